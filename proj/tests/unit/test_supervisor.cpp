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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpqd/simulation.hpp"
#include "tpqd/supervisor.hpp"
#include "tpqd/world.hpp"

using namespace tpqd;

namespace {

DrivingEvent event_at(double distance, double closing, Timestamp at = at_ms(0)) {
  DrivingEvent e;
  e.id = 1;
  e.kind = ScenarioKind::ObstacleAvoidance;
  e.detected_at = at;
  e.object_truth = ObjectClass::Human;
  e.object_distance = distance;
  e.closing_speed = closing;
  return e;
}

VehicleState vehicle(double speed, double decel = 5.0) {
  VehicleState v;
  v.speed = speed;
  v.target_speed = speed;
  v.max_decel = decel;
  return v;
}

std::vector<Tsim> constant_tsims(std::initializer_list<double> ms, double accuracy = 1.0) {
  std::vector<Tsim> out;
  const char* ids[] = {"sense", "plan", "act", "x", "y"};
  std::size_t i = 0;
  for (double m : ms) {
    AnytimeProfile p{ScenarioKind::ObstacleAvoidance, {}};
    for (int l = 0; l < 7; ++l) p.levels.push_back({LatencyModel::constant(m), accuracy});
    out.push_back(Tsim{ids[i++], p,
                       SModSpec{ActionSpec({ActionCommand::Brake, ActionCommand::Beep}), Duration(300)}});
  }
  return out;
}

// Floor-and-remainder oracle over integer weights.
std::vector<std::int64_t> split(std::int64_t tte, const std::vector<std::int64_t>& w) {
  const std::int64_t total = std::accumulate(w.begin(), w.end(), std::int64_t{0});
  std::vector<std::int64_t> out;
  std::int64_t used = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    out.push_back(tte * w[i] / total);
    used += out.back();
  }
  out.push_back(tte - used);
  return out;
}

std::vector<std::int64_t> counts(const std::vector<Duration>& ds) {
  std::vector<std::int64_t> out;
  for (auto d : ds) out.push_back(d.count());
  return out;
}

struct Harness {
  Trace trace{TraceLevel::Summary};
  EventBus bus{&trace};
  Supervisor sup;
  Harness(std::vector<Tsim> tsims, SupervisorConfig cfg, std::uint64_t seed = 1)
      : sup(bus, std::move(tsims), std::move(cfg), seed) {}

  const TraceRecord* find(std::string_view source, std::string_view kind,
                          std::string_view key = {}, std::string_view value = {}) const {
    for (const auto& r : trace.records()) {
      if (r.source != source || r.kind != kind) continue;
      if (!key.empty() && (!r.field(key) || *r.field(key) != value)) continue;
      return &r;
    }
    return nullptr;
  }
};

}  // namespace

TEST_CASE("time bounds: worked example") {
  const ControlConstants ctl;  // margin 0.5 s, smod_wcet 300 ms
  const auto est = compute_time_bounds(ctl, event_at(60, 10), vehicle(10));
  CHECK(60.0 / 10.0 == 6.0);  // detection-to-contact
  CHECK(est.bounds.tth() == Duration(3500));
  CHECK(est.bounds.tte() == Duration(3200));
  CHECK_FALSE(est.zero_budget);
  CHECK(est.smod_tth_s == doctest::Approx(3.5));
}

TEST_CASE("time bounds: the closed form is conservative under exact integration") {
  // Braking at tth stops short; braking at D/v - v/(2a) stops exactly at the object.
  const ControlConstants ctl;
  const auto est = compute_time_bounds(ctl, event_at(60, 10), vehicle(10));
  auto stop_position = [](double onset_s) {
    VehicleState v = vehicle(10);
    for (double t = 0; t + 1e-9 < onset_s; t += 0.001) v = step_world(v, 0.001);
    v = apply_command(v, ActionSpec({ActionCommand::Brake}), 0.5);
    while (v.speed > 0) v = step_world(v, 0.001);
    return v.position;
  };
  const double at_tth = stop_position(to_ms(est.bounds.tth_at()) / 1000.0);
  CHECK(at_tth == doctest::Approx(45.0).epsilon(1e-4));
  CHECK(60.0 - at_tth >= 10 * (10 / (2 * 5.0) + ctl.safety_margin_s) - 1e-3);
  CHECK(stop_position(60.0 / 10 - 10 / (2 * 5.0)) == doctest::Approx(60.0).epsilon(1e-4));
}

TEST_CASE("time bounds: no motion means no hazard") {
  ControlConstants ctl;
  const auto est = compute_time_bounds(ctl, event_at(60, 0), vehicle(0));
  CHECK(est.bounds.tth() == ctl.horizon);
  CHECK(est.bounds.tte() == ctl.horizon - ctl.smod_wcet);
}

TEST_CASE("time bounds: far objects cap at the horizon") {
  const auto est = compute_time_bounds(ControlConstants{}, event_at(5000, 10), vehicle(10));
  CHECK(est.bounds.tth() == Duration(10000));
}

TEST_CASE("time bounds: zero budget when tth leaves no room") {
  const ControlConstants ctl;
  const auto est = compute_time_bounds(ctl, event_at(22, 10), vehicle(10));  // tth 0.2 s
  CHECK(est.zero_budget);
  CHECK(est.bounds.tte() == Duration(0));
  CHECK(est.bounds.tth() == ctl.smod_wcet);
}

TEST_CASE("property: refinement only tightens and invariants always hold") {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    ControlConstants ctl;
    ctl.smod_wcet = Duration(static_cast<std::int64_t>(rng.below(600)));
    ctl.safety_margin_s = rng.uniform01();
    const double v = 40 * rng.uniform01();
    const double closing = v - 10 * rng.uniform01();
    const auto e = event_at(1 + 300 * rng.uniform01(), closing);
    const auto veh = vehicle(v, 2 + 6 * rng.uniform01());
    ctl.refine = false;
    const auto coarse = compute_time_bounds(ctl, e, veh);
    ctl.refine = true;
    const auto fine = compute_time_bounds(ctl, e, veh);
    CHECK(fine.bounds.tth() <= coarse.bounds.tth());
    CHECK(fine.dmod_tth_s <= fine.smod_tth_s);
    for (const auto& b : {coarse.bounds, fine.bounds}) {
      CHECK(b.tte() >= Duration(0));
      CHECK(b.tte() + b.smod_wcet() <= b.tth());
      CHECK(b.tth() <= std::max(ctl.horizon, ctl.smod_wcet));
    }
  }
}

TEST_CASE("allocate_budgets examples") {
  const SchedulingPolicy even;
  const SchedulingPolicy weighted{SchedulingPolicy::Kind::DynamicWeighted, {2, 1, 1}};
  CHECK(counts(allocate_budgets(Duration(3000), 3, even)) == std::vector<std::int64_t>{1000, 1000, 1000});
  CHECK(counts(allocate_budgets(Duration(100), 3, even)) == std::vector<std::int64_t>{33, 33, 34});
  CHECK(counts(allocate_budgets(Duration(3000), 3, weighted)) ==
        std::vector<std::int64_t>{1500, 750, 750});
  CHECK_THROWS_AS(allocate_budgets(Duration(100), 2, weighted), DomainError);
  CHECK_THROWS_AS(allocate_budgets(Duration(-1), 3, even), DomainError);
}

TEST_CASE("property: allocations match the oracle and conserve tte") {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto tte = static_cast<std::int64_t>(rng.below(200000));
    const auto n = 1 + rng.below(6);
    std::vector<std::int64_t> w;
    std::vector<double> wd;
    for (std::uint64_t k = 0; k < n; ++k) {
      w.push_back(1 + static_cast<std::int64_t>(rng.below(9)));
      wd.push_back(static_cast<double>(w.back()));
    }
    const auto even = allocate_budgets(Duration(tte), n, SchedulingPolicy{});
    const auto weighted = allocate_budgets(
        Duration(tte), n, SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, wd});
    CHECK(counts(even) == split(tte, std::vector<std::int64_t>(n, 1)));
    CHECK(counts(weighted) == split(tte, w));
    for (const auto* b : {&even, &weighted}) {
      CHECK(std::accumulate(b->begin(), b->end(), Duration(0)) == Duration(tte));
    }
  }
}

TEST_CASE("policy text") {
  CHECK(SchedulingPolicy::parse("static_even") == SchedulingPolicy{});
  const auto w = SchedulingPolicy::parse("dynamic_weighted:2,1,1");
  REQUIRE(w.has_value());
  CHECK(w->weights == std::vector<double>{2, 1, 1});
  CHECK(SchedulingPolicy::parse(w->str()) == w);
  CHECK_FALSE(SchedulingPolicy::parse("dynamic_weighted:").has_value());
  CHECK_FALSE(SchedulingPolicy::parse("edf").has_value());
  CHECK_THROWS_AS(validate_policy(SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, {1, 0, 1}}, 3),
                  DomainError);
}

TEST_CASE("decide_action follows the observed row") {
  const auto ladder = load_level_ladder(ScenarioKind::ObstacleAvoidance);
  InferenceResult r;
  r.observed = {ObjectClass::UnknownObject, 1};
  CHECK(decide_action(r, ladder) == ActionSpec({ActionCommand::Brake, ActionCommand::Beep}));
  r.observed = {ObjectClass::NonObstructiveShaped, 2};
  CHECK(decide_action(r, ladder) == ActionSpec({ActionCommand::Continue}));
  r.observed = {ObjectClass::ObstructiveRational, 7};
  CHECK(decide_action(r, ladder) ==
        ActionSpec({ActionCommand::Brake, ActionCommand::Stop, ActionCommand::ContinueLater}));
}

TEST_CASE("architecture names") {
  CHECK(parse_architecture("aon") == Architecture::AllOrNothing);
  CHECK(parse_architecture("simplex") == Architecture::SimplexLike);
  for (auto a : {Architecture::Savvy, Architecture::AllOrNothing, Architecture::SimplexLike}) {
    CHECK(parse_architecture(to_string(a)) == a);
  }
}

TEST_CASE("normal event: three tasks and four timers") {
  Harness h(constant_tsims({100, 100, 100}), SupervisorConfig{});
  const auto& p = h.sup.start_driving_task(event_at(60, 10), vehicle(10));
  CHECK(p.tasks.size() == 3);
  CHECK(h.sup.timers_armed() == 4);
  CHECK(p.budgets == std::vector<Duration>{Duration(1066), Duration(1066), Duration(1068)});
}

TEST_CASE("zero-budget event: SMod command without any DMod task started") {
  Harness h(constant_tsims({100, 100, 100}), SupervisorConfig{});
  h.sup.start_driving_task(event_at(22, 10), vehicle(10));
  h.bus.advance_until(at_ms(5000));
  const auto& p = h.sup.processes().front();
  CHECK(p.estimate.zero_budget);
  for (const auto& t : p.tasks) CHECK(t.status() == TaskStatus::Pending);
  REQUIRE(p.final_command.has_value());
  CHECK(p.final_command->source == CommandSource::smod());
  CHECK(p.final_command->issued_at == at_ms(300));
  CHECK(h.find("tsim.sense", "task") == nullptr);
}

TEST_CASE("early delivery: next stage starts at once with only its own budget") {
  Harness h(constant_tsims({400, 100, 100}), SupervisorConfig{});
  // tte 3200 -> 1066, 1066, 1068.
  h.sup.start_driving_task(event_at(60, 10), vehicle(10));
  h.bus.advance_until(at_ms(5000));
  const auto* plan = h.find("tsim.plan", "task", "transition", "start");
  REQUIRE(plan != nullptr);
  CHECK(plan->at == at_ms(400));
  CHECK(*plan->field("budget") == "1066");
  const auto& p = h.sup.processes().front();
  CHECK(p.tasks[1].deadline_at() == at_ms(1466));
  CHECK(p.final_command->issued_at == at_ms(600));
  CHECK(p.history == std::vector<Phase>{Phase::Scheduled, Phase::Opportunistic, Phase::Completed});
  CHECK(h.bus.pending() == 0);  // every timer cancelled
}

TEST_CASE("stage overrun: SMod takes over") {
  // Plan cannot fit its budget at any level once forced past it.
  auto tsims = constant_tsims({100, 100, 100});
  tsims[1].profile.levels.assign(7, {LatencyModel::triangular(900, 1100, 1200), 1.0});
  Harness h(tsims, SupervisorConfig{});
  h.sup.start_driving_task(event_at(60, 10), vehicle(10));
  h.bus.advance_until(at_ms(5000));
  const auto& p = h.sup.processes().front();
  CHECK(p.fallback_stage == std::optional<std::size_t>(1));
  REQUIRE(p.final_command.has_value());
  CHECK(p.final_command->source == CommandSource::smod());
  CHECK(p.history == std::vector<Phase>{Phase::Scheduled, Phase::Opportunistic,
                                        Phase::SafeFallback, Phase::Completed});
  CHECK(p.final_command->issued_at <= p.bounds().tth_at());
  CHECK(h.sup.faults() == 0);
}

TEST_CASE("all-or-nothing: top level, no stage timers, guard only") {
  SupervisorConfig cfg;
  cfg.architecture = Architecture::AllOrNothing;
  Harness h(constant_tsims({100, 100, 100}), cfg);
  h.sup.start_driving_task(event_at(60, 10), vehicle(10));
  CHECK(h.sup.timers_armed() == 1);
  h.bus.advance_until(at_ms(5000));
  const auto& p = h.sup.processes().front();
  for (const auto& o : p.outcomes) {
    REQUIRE(o.has_value());
    CHECK(o->config->level == 7);
  }
  cfg.guard_enabled = false;
  Harness off(constant_tsims({100, 100, 100}), cfg);
  off.sup.start_driving_task(event_at(60, 10), vehicle(10));
  CHECK(off.sup.timers_armed() == 0);
}

TEST_CASE("all-or-nothing guard brakes at tth when perception is too slow") {
  SupervisorConfig cfg;
  cfg.architecture = Architecture::AllOrNothing;
  Harness h(constant_tsims({5000, 100, 100}), cfg);
  h.sup.start_driving_task(event_at(60, 10), vehicle(10));
  h.bus.advance_until(at_ms(8000));
  const auto& p = h.sup.processes().front();
  CHECK(p.guard_engaged);
  REQUIRE(p.final_command.has_value());
  CHECK(p.final_command->source == CommandSource::guard());
  CHECK(p.final_command->issued_at == p.bounds().tth_at());
}

TEST_CASE("adversarial profiles: always fall back, never fault") {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  for (auto& t : s.tsims) {
    for (auto& lp : t.profile.levels) lp.latency = LatencyModel::triangular(4000, 4500, 5000);
  }
  int fallbacks = 0, faults = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto r = run_scenario(s, seed, TraceLevel::None);
    fallbacks += r.verdict.fallback;
    faults += r.verdict.faults;
  }
  CHECK(fallbacks == 1000);
  CHECK(faults == 0);
}

TEST_CASE("single authority: every actuator delivery matches an SCC command") {
  for (const auto& id : kIncidentIds) {
    for (auto arch : {Architecture::Savvy, Architecture::AllOrNothing, Architecture::SimplexLike}) {
      ScenarioSpec s = incident_fixture(id);
      s.architecture = arch;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r = run_scenario(s, seed);
        std::vector<std::string> commanded, delivered;
        for (const auto& rec : r.trace.records()) {
          if (rec.source == "scc" && rec.kind == "command") commanded.push_back(*rec.field("at"));
          if (rec.kind == "deliver" && *rec.field("topic") == "actuators") {
            delivered.push_back(std::to_string(to_ms(rec.at)));
          }
        }
        CHECK(commanded == delivered);
        CHECK(r.commands.size() == commanded.size());
      }
    }
  }
}

TEST_CASE("supervisor rejects inconsistent configuration") {
  EventBus bus;
  SupervisorConfig cfg;
  auto tsims = constant_tsims({100, 100, 100});
  tsims[0].smod.wcet = Duration(400);  // exceeds the reserved 300 ms
  CHECK_THROWS_AS(Supervisor(bus, tsims, cfg, 1), DomainError);
  cfg.policy = SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, {1, 1}};
  CHECK_THROWS_AS(Supervisor(bus, constant_tsims({100, 100, 100}), cfg, 1), DomainError);
  CHECK_THROWS_AS(Supervisor(bus, {}, SupervisorConfig{}, 1), DomainError);
}
