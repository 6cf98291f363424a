// Copyright 2026 The tpqd-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tpqd/scenario.hpp"

#include <cmath>
#include <set>

namespace tpqd {
namespace {

const char* const kStageIds[] = {"sense", "plan", "act"};

template <typename F>
void collect(std::vector<std::string>& errors, F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    errors.emplace_back(e.what());
  }
}

Tsim stage(ScenarioKind kind, int index, Duration smod_wcet) {
  return Tsim{kStageIds[index], default_profile(kind, index),
              SModSpec{load_level_ladder(kind).front().action, smod_wcet}};
}

void set_accuracy(Tsim& t, int from_level, int to_level, double accuracy) {
  for (int l = from_level; l <= to_level; ++l) {
    t.profile.levels[static_cast<std::size_t>(l - 1)].accuracy = accuracy;
  }
}

void scale_latency(Tsim& t, double factor) {
  for (auto& lp : t.profile.levels) {
    const auto& m = lp.latency;
    lp.latency = LatencyModel::triangular(m.p0() * factor, m.p1() * factor, m.p2() * factor);
  }
}

ScenarioSpec obstacle(std::string name, ObjectClass truth, double speed, double distance,
                      double detection) {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  s.name = std::move(name);
  s.vehicle.speed = speed;
  s.object = ObjectSpec{truth, distance, 0.0, false};
  s.detection.distance = detection;
  return s;
}

// I1: detection 6 s before impact; the top-level perception result lands
// after 4.5 s and the plan after 4.7 s, with the act stage still to run.
ScenarioSpec incident_i1() {
  ScenarioSpec s = obstacle("I1", ObjectClass::Human, 10.0, 60.0, 60.0);
  s.description = "pedestrian with bicycle at night, perception converges too late";
  s.constants.guard = false;
  auto& sense = s.tsims[0];
  sense.profile.levels[6].latency = LatencyModel::constant(4500);
  for (int i : {1, 2}) {
    auto& t = s.tsims[static_cast<std::size_t>(i)];
    for (int l = 0; l < 6; ++l) t.profile.levels[static_cast<std::size_t>(l)].latency = LatencyModel::constant(50);
    t.profile.levels[6].latency = LatencyModel::constant(i == 1 ? 200 : 500);
  }
  for (auto& t : s.tsims) set_accuracy(t, 1, 7, 1.0);
  return s;
}

// I2: uncalibrated camera; every perception level is slower and the
// discriminating levels lose accuracy. No emergency path.
ScenarioSpec incident_i2() {
  ScenarioSpec s = obstacle("I2", ObjectClass::Vehicle, 15.0, 80.0, 70.0);
  s.description = "uncalibrated camera after windshield replacement, degraded perception";
  s.constants.guard = false;
  auto& sense = s.tsims[0];
  scale_latency(sense, 1.5);
  for (int l = 2; l <= 7; ++l) {
    auto& lp = sense.profile.levels[static_cast<std::size_t>(l - 1)];
    lp.accuracy *= 0.9;
  }
  return s;
}

// I3: damaged attenuator never classified in time, no emergency path.
ScenarioSpec incident_i3() {
  ScenarioSpec s = obstacle("I3", ObjectClass::Attenuator, 30.0, 300.0, 250.0);
  s.description = "damaged highway attenuator, full classification never arrives in time";
  s.constants.guard = false;
  s.tsims[0].profile.levels[6].latency = LatencyModel::constant(9000);
  return s;
}

// I4: the lead vehicle swerves and reveals a stopped truck 120 m ahead.
ScenarioSpec incident_i4() {
  ScenarioSpec s = obstacle("I4", ObjectClass::Truck, 30.0, 120.0, 120.0);
  s.description = "stopped fire truck revealed late by a swerving lead vehicle";
  s.constants.guard = false;
  s.tsims[0].profile.levels[6].latency = LatencyModel::triangular(800, 1000, 1400);
  return s;
}

// I5: crossing trailer; deep levels confuse it with an overhead sign.
ScenarioSpec incident_i5() {
  ScenarioSpec s = obstacle("I5", ObjectClass::Truck, 20.0, 110.0, 110.0);
  s.description = "crossing tractor trailer, deep classification misses it";
  s.constants.guard = false;
  set_accuracy(s.tsims[0], 1, 5, 1.0);
  set_accuracy(s.tsims[0], 6, 7, 0.1);
  for (std::size_t i = 1; i < s.tsims.size(); ++i) set_accuracy(s.tsims[i], 1, 7, 1.0);
  return s;
}

// I6: slow sweeper found late; requiring two sensors to agree squares the
// per-level accuracy.
ScenarioSpec incident_i6() {
  ScenarioSpec s = obstacle("I6", ObjectClass::Vehicle, 20.0, 50.0, 50.0);
  s.description = "slow street sweeper detected late, camera and radar must agree";
  s.object->speed = 2.0;
  s.constants.guard = false;
  for (auto& lp : s.tsims[0].profile.levels) lp.accuracy *= lp.accuracy;
  return s;
}

// I7: unprotected turn; without cooperative sensing the plan ladder can only
// reach its conservative row.
ScenarioSpec incident_i7() {
  ScenarioSpec s = default_scenario(ScenarioKind::IntersectionCrossing);
  s.name = "I7";
  s.description = "unprotected turn across an oncoming path, no cooperative sensing";
  s.vehicle.speed = 10.0;
  s.object = ObjectSpec{ObjectClass::Vehicle, 40.0, 0.0, false};
  s.detection = DetectionSpec{40.0, CooperativeSensing::None};
  return s;
}

}  // namespace

std::vector<Tsim> default_tsims(ScenarioKind kind, Duration smod_wcet) {
  return {stage(kind, 0, smod_wcet), stage(kind, 1, smod_wcet), stage(kind, 2, smod_wcet)};
}

ScenarioSpec default_scenario(ScenarioKind kind) {
  ScenarioSpec s;
  s.kind = kind;
  s.name = std::string(to_string(kind));
  s.tsims = default_tsims(kind, s.constants.control.smod_wcet);
  switch (kind) {
    case ScenarioKind::ObstacleAvoidance:
      s.vehicle.speed = 10.0;
      s.object = ObjectSpec{ObjectClass::Human, 60.0, 0.0, false};
      s.detection = DetectionSpec{60.0, CooperativeSensing::None};
      break;
    case ScenarioKind::IntersectionCrossing:
      s.vehicle.speed = 10.0;
      s.object = ObjectSpec{ObjectClass::Vehicle, 50.0, 0.0, false};
      s.detection = DetectionSpec{50.0, CooperativeSensing::RsuShort};
      break;
    case ScenarioKind::Overtaking:
      s.vehicle.speed = 20.0;
      s.object = ObjectSpec{ObjectClass::Vehicle, 200.0, -15.0, true};
      s.detection = DetectionSpec{150.0, CooperativeSensing::RsuLong};
      break;
    case ScenarioKind::CrashAvoidance:
      s.vehicle.speed = 20.0;
      s.object = ObjectSpec{ObjectClass::Vehicle, 80.0, 5.0, false};
      s.detection = DetectionSpec{70.0, CooperativeSensing::None};
      break;
  }
  return s;
}

std::vector<std::string> scenario_errors(const ScenarioSpec& spec) {
  std::vector<std::string> errors;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  require(!spec.name.empty(), "scenario: name must not be empty");
  require(std::isfinite(spec.vehicle.speed) && spec.vehicle.speed >= 0.0,
          "vehicle: speed must be finite and >= 0");
  require(std::isfinite(spec.vehicle.max_decel) && spec.vehicle.max_decel > 0.0,
          "vehicle: max_decel must be > 0");
  if (spec.object) {
    require(is_leaf(spec.object->truth), "object: truth must be a leaf class");
    require(std::isfinite(spec.object->distance) && spec.object->distance > 0.0,
            "object: distance must be > 0");
    require(std::isfinite(spec.object->speed), "object: speed must be finite");
  }
  require(std::isfinite(spec.detection.distance) && spec.detection.distance > 0.0,
          "detection: distance must be > 0");
  require(spec.kind != ScenarioKind::ObstacleAvoidance ||
              spec.detection.cooperative == CooperativeSensing::None,
          "detection: cooperative sensing does not apply to obstacle avoidance");

  const auto& c = spec.constants;
  require(std::isfinite(c.control.safety_margin_s) && c.control.safety_margin_s >= 0.0,
          "constants: safety_margin_s must be >= 0");
  require(c.control.horizon > Duration::zero(), "constants: horizon_ms must be > 0");
  require(c.control.smod_wcet >= Duration::zero(), "constants: smod_wcet_ms must be >= 0");
  require(c.planning_quantile > 0.0 && c.planning_quantile < 1.0,
          "constants: planning_quantile must be in (0, 1)");
  require(c.slow_factor >= 0.0 && c.slow_factor <= 1.0, "constants: slow_factor must be in [0, 1]");
  require(c.dt > Duration::zero(), "constants: dt_ms must be > 0");
  require(c.max_time > Duration::zero(), "constants: max_time_ms must be > 0");

  collect(errors, [&] { validate_policy(spec.policy, spec.tsims.size()); });

  const int levels = ladder_size(spec.kind);
  if (!spec.ladder.empty()) {
    collect(errors, [&] { validate_ladder(spec.ladder); });
    require(spec.ladder.front().scenario == spec.kind, "ladder: scenario kind mismatch");
  }
  std::set<std::string> ids;
  for (const auto& t : spec.tsims) {
    require(ids.insert(t.id).second, "tsim " + t.id + ": duplicate id");
    const std::size_t before = errors.size();
    collect(errors, [&] { validate_tsim(t, spec.kind); });
    require(t.profile.top_level() == levels, "profile needs " + std::to_string(levels) + " levels");
    require(t.smod.wcet <= c.control.smod_wcet, "smod wcet exceeds the reserved smod_wcet_ms");
    if (errors.size() == before && c.planning_quantile > 0.0 && c.planning_quantile < 1.0) {
      collect(errors, [&] { TedEstimator ted(t.profile, c.planning_quantile); });
    }
    for (std::size_t i = before; i < errors.size(); ++i) {
      if (!errors[i].starts_with("tsim ")) errors[i] = "tsim " + t.id + ": " + errors[i];
    }
  }
  return errors;
}

void validate_scenario(const ScenarioSpec& spec) {
  const auto errors = scenario_errors(spec);
  if (errors.empty()) return;
  std::string msg = "invalid scenario " + spec.name + ":";
  for (const auto& e : errors) msg += "\n  " + e;
  throw DomainError(msg);
}

ScenarioSpec incident_fixture(std::string_view id) {
  if (id == "I1") return incident_i1();
  if (id == "I2") return incident_i2();
  if (id == "I3") return incident_i3();
  if (id == "I4") return incident_i4();
  if (id == "I5") return incident_i5();
  if (id == "I6") return incident_i6();
  if (id == "I7") return incident_i7();
  throw DomainError("unknown incident id: " + std::string(id));
}

}  // namespace tpqd
