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

#include "tpqd/simulation.hpp"

#include <cmath>

#include "text_util.hpp"

namespace tpqd {
namespace {

double seconds(Timestamp t) { return static_cast<double>(to_ms(t)) / 1000.0; }

std::string fmt(double v) { return detail::format_double(v); }

}  // namespace

std::optional<Duration> detection_time(const ScenarioSpec& spec) {
  if (!spec.object) return std::nullopt;
  const double gap0 = spec.object->distance;
  if (gap0 <= spec.detection.distance) return Duration::zero();
  const double closing = spec.vehicle.speed - spec.object->speed;
  if (closing <= 0.0) return std::nullopt;
  const double ms = (gap0 - spec.detection.distance) / closing * 1000.0;
  return Duration(static_cast<std::int64_t>(std::ceil(ms - 1e-9)));
}

RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t seed, TraceLevel level) {
  validate_scenario(spec);

  RunResult out;
  out.trace = Trace(level);
  out.header = "# tpqd-trace v1 scenario=" + spec.name +
               " arch=" + std::string(to_string(spec.architecture)) +
               " seed=" + std::to_string(seed);

  EventBus bus(&out.trace);
  SupervisorConfig cfg;
  cfg.architecture = spec.architecture;
  cfg.policy = spec.policy;
  cfg.control = spec.constants.control;
  cfg.planning_quantile = spec.constants.planning_quantile;
  cfg.guard_enabled = spec.constants.guard;
  cfg.ladder = spec.ladder;
  Supervisor supervisor(bus, spec.tsims, cfg, seed);

  VehicleState vehicle;
  vehicle.speed = spec.vehicle.speed;
  vehicle.max_decel = spec.vehicle.max_decel;
  vehicle.target_speed = spec.vehicle.speed;
  std::optional<WorldObject> object;
  if (spec.object) {
    object = WorldObject{spec.object->truth, spec.object->distance, spec.object->speed,
                         spec.object->adjacent};
  }
  World world(vehicle, object, spec.constants.slow_factor);
  const bool agreement = spec.detection.cooperative == CooperativeSensing::Active;
  std::optional<double> onset_margin;

  bus.subscribe(Topic::Actuators, [&](const Delivery& d) {
    const auto* cmd = std::any_cast<ActuatorCommand>(&d.message.body);
    if (!cmd) return;
    world.advance_to(seconds(d.at));
    const bool was_stopping = world.stopping_commanded();
    world.apply(cmd->action, agreement);
    if (!was_stopping && world.stopping_commanded()) onset_margin = world.stopping_margin();
    out.trace.record(d.at, "world", "apply",
                     {{"action", cmd->action.str()},
                      {"gap", fmt(world.gap())},
                      {"speed", fmt(world.vehicle().speed)}});
  });

  std::optional<TimerHandle> detection;
  bus.on_timer([&](const TimerHandle& t) {
    if (!detection || t.id != detection->id || world.collided()) return;
    DrivingEvent event;
    event.id = 1;
    event.kind = spec.kind;
    event.detected_at = bus.now();
    event.object_truth = spec.object->truth;
    event.object_distance = world.gap();
    event.closing_speed = world.closing_speed();
    event.cooperative = spec.detection.cooperative;
    Message msg;
    msg.summary = "event=1,object=" + std::string(to_string(event.object_truth)) +
                  ",distance=" + fmt(event.object_distance);
    msg.body = PreliminaryDetection{event, world.vehicle()};
    bus.publish(Topic::SensorsPreliminary, std::move(msg), bus.now());
  });

  const Timestamp end = Timestamp(spec.constants.max_time);
  if (auto det = detection_time(spec); det && *det <= spec.constants.max_time) {
    detection = bus.set_timer(Timestamp(*det), TimerKind::Custom);
  }

  while (true) {
    Timestamp target = std::min(bus.now() + spec.constants.dt, end);
    if (auto next = bus.next_fire_at(); next && *next < target) target = *next;
    world.advance_to(seconds(target));
    bus.advance_until(target);
    out.trace.record(target, "world", "tick",
                     {{"pos", fmt(world.vehicle().position)},
                      {"speed", fmt(world.vehicle().speed)},
                      {"gap", fmt(world.gap())}},
                     TraceLevel::Full);
    if (world.collided() || world.passed() || target >= end) break;
    if (bus.pending() == 0 && world.quiescent()) break;
  }

  Verdict& v = out.verdict;
  v.ended_at = bus.now();
  v.collided = world.collided();
  const double a = world.vehicle().max_decel;
  if (v.collided) {
    v.outcome = Outcome::Collision;
    v.margin = onset_margin && *onset_margin < 0.0 ? *onset_margin
                                                    : -world.impact_speed() * world.impact_speed() / (2.0 * a);
  } else if (world.stopping_commanded()) {
    v.outcome = Outcome::SafeStop;
    v.margin = std::isfinite(world.gap()) ? world.gap() : 0.0;
  } else {
    v.outcome = Outcome::SafePass;
    v.margin = 0.0;
  }

  if (!supervisor.processes().empty()) {
    const DrivingTaskProcess& p = supervisor.processes().front();
    v.detected = true;
    v.guard_engaged = p.guard_engaged;
    if (p.final_command) {
      v.decision_latency = p.final_command->issued_at - p.bounds().origin();
      if (p.final_command->source.kind == CommandSource::Kind::DMod) {
        v.achieved_level = p.tasks.front().delivered_level();
        v.acted_row = p.final_command->source.level;
      }
    }
    const bool late = !p.final_command || p.final_command->issued_at > p.bounds().tte_at();
    v.fallback = p.fallback_stage.has_value() || p.guard_engaged ||
                 (spec.architecture == Architecture::AllOrNothing && late);
    out.process = p;
  }
  v.faults = supervisor.faults();
  if (v.faults > 0) v.outcome = Outcome::SafetyViolationFault;
  out.commands = supervisor.commands();

  std::vector<std::pair<std::string, std::string>> fields{
      {"outcome", std::string(to_string(v.outcome))},
      {"margin", fmt(v.margin)},
      {"level", v.achieved_level ? std::to_string(*v.achieved_level) : "smod"},
      {"latency", v.decision_latency ? std::to_string(v.decision_latency->count()) : "none"},
      {"fallback", v.fallback ? "1" : "0"},
      {"guard", v.guard_engaged ? "1" : "0"},
      {"faults", std::to_string(v.faults)},
  };
  out.trace.record_fields(bus.now(), "sim", "verdict", std::move(fields));
  return out;
}

RunResult run_baseline_all_or_nothing(const ScenarioSpec& spec, std::uint64_t seed,
                                      TraceLevel level) {
  ScenarioSpec baseline = spec;
  baseline.architecture = Architecture::AllOrNothing;
  return run_scenario(baseline, seed, level);
}

}  // namespace tpqd
