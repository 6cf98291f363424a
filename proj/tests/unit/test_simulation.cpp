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

#include <doctest.h>

#include <cmath>

#include "tpqd/simulation.hpp"

using namespace tpqd;

namespace {

// Stop margin when the first stopping command lands at `t` seconds with the
// vehicle still at cruise speed: gap left minus braking distance.
double stop_margin(double distance, double speed, double decel, double t) {
  return distance - speed * t - speed * speed / (2 * decel);
}

ScenarioSpec exact(ScenarioSpec s) {
  for (auto& t : s.tsims) {
    for (auto& lp : t.profile.levels) lp.accuracy = 1.0;
  }
  return s;
}

std::size_t count(const RunResult& r, std::string_view source, std::string_view kind) {
  std::size_t n = 0;
  for (const auto& rec : r.trace.records()) n += rec.source == source && rec.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("empty road: SafePass and no driving task") {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  s.object.reset();
  s.constants.max_time = Duration(5000);
  const auto r = run_scenario(s, 1);
  CHECK(r.verdict.outcome == Outcome::SafePass);
  CHECK_FALSE(r.verdict.detected);
  CHECK_FALSE(r.process.has_value());
  CHECK(r.commands.empty());
  CHECK_FALSE(detection_time(s).has_value());
}

TEST_CASE("detection_time") {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  CHECK(detection_time(s) == Duration(0));
  s.object->distance = 100;
  s.detection.distance = 60;
  CHECK(detection_time(s) == Duration(4000));
  s.object->speed = 10;  // matches the vehicle, never closes
  CHECK_FALSE(detection_time(s).has_value());
}

TEST_CASE("I1: the baseline collides, the supervisor stops") {
  const ScenarioSpec i1 = incident_fixture("I1");
  const auto aon = run_baseline_all_or_nothing(i1, 1);
  CHECK(aon.verdict.outcome == Outcome::Collision);
  REQUIRE(aon.verdict.decision_latency.has_value());
  CHECK(*aon.verdict.decision_latency == Duration(5200));
  CHECK(aon.verdict.margin == doctest::Approx(stop_margin(60, 10, 5, 5.2)));
  CHECK(aon.verdict.achieved_level == 7);

  const auto savvy = run_scenario(i1, 1);
  CHECK(savvy.verdict.outcome == Outcome::SafeStop);
  CHECK(savvy.verdict.faults == 0);
  REQUIRE(savvy.verdict.decision_latency.has_value());
  const double t = savvy.verdict.decision_latency->count() / 1000.0;
  CHECK(savvy.verdict.margin == doctest::Approx(stop_margin(60, 10, 5, t)));
  CHECK(savvy.verdict.margin > 0);
  REQUIRE(savvy.process.has_value());
  CHECK(savvy.process->final_command->issued_at <= savvy.process->bounds().tth_at());
}

TEST_CASE("runs are reproducible byte for byte") {
  for (const auto& id : kIncidentIds) {
    const auto spec = incident_fixture(id);
    for (std::uint64_t seed : {1u, 7u, 123456u}) {
      CHECK(run_scenario(spec, seed, TraceLevel::Full).serialize() ==
            run_scenario(spec, seed, TraceLevel::Full).serialize());
    }
  }
}

TEST_CASE("trace header and verdict record") {
  const auto r = run_scenario(incident_fixture("I1"), 9);
  CHECK(r.header == "# tpqd-trace v1 scenario=I1 arch=savvy seed=9");
  const auto& last = r.trace.records().back();
  CHECK(last.source == "sim");
  CHECK(last.kind == "verdict");
  CHECK(*last.field("outcome") == "SafeStop");
  const auto text = r.serialize();
  CHECK(text.rfind(r.header + "\n", 0) == 0);
  CHECK(text.back() == '\n');
}

TEST_CASE("trace level none keeps only the outcome") {
  const auto r = run_scenario(incident_fixture("I3"), 2, TraceLevel::None);
  CHECK(r.trace.records().empty());
  CHECK(r.verdict.detected);
}

TEST_CASE("causality: every world apply follows its command") {
  for (const auto& id : kIncidentIds) {
    const auto r = run_scenario(incident_fixture(id), 3, TraceLevel::Full);
    std::size_t commands = 0;
    for (const auto& rec : r.trace.records()) {
      if (rec.source == "scc" && rec.kind == "command") ++commands;
      if (rec.source == "world" && rec.kind == "apply") {
        CHECK(commands > 0);
      }
    }
    CHECK(count(r, "world", "apply") == r.commands.size());
  }
}

TEST_CASE("late results never reach the supervisor") {
  // Any tsim.results delivery after the task deadline would be a discard failure.
  for (const auto& id : kIncidentIds) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto r = run_scenario(incident_fixture(id), seed);
      if (!r.process) continue;
      for (const auto& rec : r.trace.records()) {
        if (rec.kind != "deliver" || *rec.field("topic") != "tsim.results") continue;
        const auto& payload = *rec.field("payload");
        bool matched = false;
        for (const auto& task : r.process->tasks) {
          if (payload.find("task=" + std::to_string(task.id()) + ",") == std::string::npos) continue;
          matched = true;
          CHECK(rec.at <= task.deadline_at());
        }
        CHECK(matched);
      }
    }
  }
}

TEST_CASE("paired dominance on exact-accuracy fixtures") {
  // Same seed, same streams: when the baseline is safe, so is the supervisor.
  for (double distance : {30.0, 45.0, 60.0, 80.0, 120.0}) {
    for (auto truth : {ObjectClass::Human, ObjectClass::Truck, ObjectClass::Attenuator}) {
      ScenarioSpec s = exact(default_scenario(ScenarioKind::ObstacleAvoidance));
      s.object->truth = truth;
      s.object->distance = distance;
      s.detection.distance = distance;
      s.constants.guard = false;
      for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto savvy = run_scenario(s, seed, TraceLevel::None);
        const auto aon = run_baseline_all_or_nothing(s, seed, TraceLevel::None);
        CHECK(savvy.verdict.faults == 0);
        if (aon.verdict.outcome != Outcome::Collision) {
          CHECK(savvy.verdict.outcome != Outcome::Collision);
        }
      }
    }
  }
}

TEST_CASE("I5: shallow braking beats deep misclassification") {
  int savvy_collisions = 0, aon_collisions = 0;
  const auto spec = incident_fixture("I5");
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    savvy_collisions += run_scenario(spec, seed, TraceLevel::None).verdict.collided;
    aon_collisions += run_baseline_all_or_nothing(spec, seed, TraceLevel::None).verdict.collided;
  }
  CHECK(savvy_collisions == 0);
  // Wrong deep outputs are often still obstructive classes that brake.
  CHECK(aon_collisions >= 15);
}

TEST_CASE("I7: without cooperative sensing only the conservative row is reachable") {
  const auto spec = incident_fixture("I7");
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (auto arch : {Architecture::Savvy, Architecture::AllOrNothing}) {
      ScenarioSpec s = spec;
      s.architecture = arch;
      const auto r = run_scenario(s, seed, TraceLevel::None);
      CHECK(r.verdict.outcome == Outcome::SafeStop);
      if (r.verdict.acted_row) CHECK(*r.verdict.acted_row == 1);
    }
  }
}

TEST_CASE("zero budget: the supervisor still stops, with no perception work") {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  s.object->distance = 22;
  s.detection.distance = 22;
  const auto r = run_scenario(s, 1);
  REQUIRE(r.process.has_value());
  CHECK(r.process->estimate.zero_budget);
  CHECK(r.verdict.fallback);
  CHECK(r.verdict.faults == 0);
  CHECK(r.verdict.decision_latency == Duration(300));
  CHECK(count(r, "tsim.sense", "task") == 0);
}

TEST_CASE("invalid specs are rejected before running") {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  s.vehicle.max_decel = 0;
  CHECK_THROWS_AS(run_scenario(s, 1), DomainError);
}
