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

#include "tpqd/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "text_util.hpp"

namespace tpqd {
namespace {

std::int64_t floor_ms(double seconds) {
  // The epsilon absorbs representation error such as 3.4999999999999996.
  return static_cast<std::int64_t>(std::floor(seconds * 1000.0 + 1e-6));
}

/// Latest time (s) at which full braking still avoids contact, assuming the
/// object keeps its speed. Infinite when the object is not being closed on.
double braking_onset(double distance, double vehicle_speed, double closing, double decel) {
  if (closing <= 0.0 || decel <= 0.0) return std::numeric_limits<double>::infinity();
  const double object_speed = vehicle_speed - closing;
  if (object_speed >= 0.0) return distance / closing - closing / (2.0 * decel);
  const double stop_dist = vehicle_speed * vehicle_speed / (2.0 * decel);
  const double object_run = -object_speed * vehicle_speed / decel;
  return (distance - stop_dist - object_run) / closing;
}

}  // namespace

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Savvy: return "savvy";
    case Architecture::AllOrNothing: return "all_or_nothing";
    case Architecture::SimplexLike: return "simplex_like";
  }
  return "?";
}

std::optional<Architecture> parse_architecture(std::string_view text) {
  if (text == "savvy") return Architecture::Savvy;
  if (text == "all_or_nothing" || text == "aon") return Architecture::AllOrNothing;
  if (text == "simplex_like" || text == "simplex") return Architecture::SimplexLike;
  return std::nullopt;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Scheduled: return "scheduled";
    case Phase::Opportunistic: return "opportunistic";
    case Phase::SafeFallback: return "safe_fallback";
    case Phase::Completed: return "completed";
  }
  return "?";
}

BoundsEstimate compute_time_bounds(const ControlConstants& ctl, const DrivingEvent& event,
                                   const VehicleState& vehicle) {
  if (ctl.smod_wcet < Duration::zero()) throw DomainError("smod wcet must be >= 0");
  if (ctl.horizon <= Duration::zero()) throw DomainError("horizon must be > 0");
  if (!(vehicle.max_decel > 0.0)) throw DomainError("max deceleration must be > 0");
  if (!(event.object_distance > 0.0)) throw DomainError("object distance must be > 0");

  const double v = vehicle.speed;
  const double a = vehicle.max_decel;
  const double horizon_s = static_cast<double>(ctl.horizon.count()) / 1000.0;

  BoundsEstimate est;
  est.smod_tth_s = v > 0.0 ? event.object_distance / v - v / a - ctl.safety_margin_s : horizon_s;
  est.dmod_tth_s = est.smod_tth_s;
  if (ctl.refine) {
    const double onset = braking_onset(event.object_distance, v, event.closing_speed, a);
    est.dmod_tth_s = std::min(est.smod_tth_s, onset - ctl.safety_margin_s);
  }

  const double tth_s = std::min(est.dmod_tth_s, horizon_s);
  const std::int64_t tth = std::min<std::int64_t>(floor_ms(tth_s), ctl.horizon.count());
  if (tth < ctl.smod_wcet.count()) {
    est.zero_budget = true;
    est.bounds = TimeBounds(event.detected_at, Duration::zero(), ctl.smod_wcet, ctl.smod_wcet);
  } else {
    est.bounds = TimeBounds(event.detected_at, Duration(tth) - ctl.smod_wcet, Duration(tth),
                            ctl.smod_wcet);
  }
  return est;
}

std::string SchedulingPolicy::str() const {
  if (kind == Kind::StaticEven) return "static_even";
  std::string out = "dynamic_weighted:";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i) out += ',';
    out += detail::format_double(weights[i]);
  }
  return out;
}

std::optional<SchedulingPolicy> SchedulingPolicy::parse(std::string_view text) {
  text = detail::trim(text);
  if (text == "static_even") return SchedulingPolicy{};
  constexpr std::string_view prefix = "dynamic_weighted:";
  if (!text.starts_with(prefix)) return std::nullopt;
  SchedulingPolicy p;
  p.kind = Kind::DynamicWeighted;
  for (auto part : detail::split(text.substr(prefix.size()), ',')) {
    auto w = detail::parse_double(part);
    if (!w) return std::nullopt;
    p.weights.push_back(*w);
  }
  if (p.weights.empty()) return std::nullopt;
  return p;
}

void validate_policy(const SchedulingPolicy& policy, std::size_t stages) {
  if (stages == 0) throw DomainError("policy: need at least one TSIM");
  if (policy.kind == SchedulingPolicy::Kind::StaticEven) {
    if (!policy.weights.empty()) throw DomainError("policy: static_even takes no weights");
    return;
  }
  if (policy.weights.size() != stages) {
    throw DomainError("policy: expected " + std::to_string(stages) + " weights, got " +
                      std::to_string(policy.weights.size()));
  }
  for (double w : policy.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("policy: weights must be finite and > 0");
  }
}

std::vector<Duration> allocate_budgets(Duration tte, std::size_t stages,
                                       const SchedulingPolicy& policy) {
  validate_policy(policy, stages);
  if (tte < Duration::zero()) throw DomainError("allocate: tte must be >= 0");
  const std::int64_t total = tte.count();
  std::vector<Duration> out(stages);
  std::int64_t used = 0;
  if (policy.kind == SchedulingPolicy::Kind::StaticEven) {
    const auto share = total / static_cast<std::int64_t>(stages);
    for (std::size_t i = 0; i + 1 < stages; ++i) out[i] = Duration(share);
    used = share * static_cast<std::int64_t>(stages - 1);
  } else {
    const double sum = std::accumulate(policy.weights.begin(), policy.weights.end(), 0.0);
    for (std::size_t i = 0; i + 1 < stages; ++i) {
      const auto share = static_cast<std::int64_t>(
          std::floor(static_cast<double>(total) * policy.weights[i] / sum));
      out[i] = Duration(std::min(share, total - used));
      used += out[i].count();
    }
  }
  out.back() = Duration(total - used);
  return out;
}

ActionSpec decide_action(const InferenceResult& output, const LevelLadder& ladder) {
  const int row = output.observed.row;
  if (row < 1 || row > static_cast<int>(ladder.size())) {
    throw DomainError("decide_action: row " + std::to_string(row) + " outside the ladder");
  }
  return ladder[static_cast<std::size_t>(row - 1)].action;
}

Supervisor::Supervisor(EventBus& bus, std::vector<Tsim> tsims, SupervisorConfig config,
                       std::uint64_t seed)
    : bus_(bus), tsims_(std::move(tsims)), config_(std::move(config)), seed_(seed) {
  if (tsims_.empty()) throw DomainError("supervisor: need at least one TSIM");
  const ScenarioKind kind = tsims_.front().profile.scenario;
  if (config_.ladder.empty()) config_.ladder = load_level_ladder(kind);
  validate_ladder(config_.ladder);
  if (config_.ladder.front().scenario != kind) throw DomainError("supervisor: ladder kind mismatch");
  validate_policy(config_.policy, tsims_.size());
  for (const auto& t : tsims_) {
    validate_tsim(t, kind);
    if (t.profile.top_level() != static_cast<int>(config_.ladder.size())) {
      throw DomainError("tsim " + t.id + ": profile has " + std::to_string(t.profile.top_level()) +
                        " levels, ladder has " + std::to_string(config_.ladder.size()));
    }
    // The bounds reserve smod_wcet for the takeover; a slower SMod could not
    // meet tth.
    if (t.smod.wcet > config_.control.smod_wcet) {
      throw DomainError("tsim " + t.id + ": SMod wcet exceeds the reserved smod_wcet");
    }
    teds_.emplace_back(t.profile, config_.planning_quantile);
  }

  bus_.subscribe(Topic::SensorsPreliminary, [this](const Delivery& d) {
    const auto* det = std::any_cast<PreliminaryDetection>(&d.message.body);
    if (!det) return;
    const bool busy = std::any_of(processes_.begin(), processes_.end(),
                                  [](const auto& p) { return p.phase != Phase::Completed; });
    if (busy) {
      note("ignored", {{"event", std::to_string(det->event.id)}, {"reason", "process_active"}});
      return;
    }
    start_driving_task(det->event, det->vehicle);
  });
  bus_.subscribe(Topic::TsimResults, [this](const Delivery& d) {
    if (const auto* r = std::any_cast<TsimReport>(&d.message.body)) on_result(*r);
  });
  bus_.subscribe(Topic::Actuators, [this](const Delivery& d) {
    if (const auto* c = std::any_cast<ActuatorCommand>(&d.message.body)) on_actuator(*c);
  });
  bus_.on_timer([this](const TimerHandle& t) { on_timer(t); });
}

int Supervisor::faults() const {
  int n = 0;
  for (const auto& p : processes_) n += p.faults;
  return n;
}

void Supervisor::note(std::string_view kind,
                      std::vector<std::pair<std::string, std::string>> fields) {
  if (Trace* t = bus_.trace()) t->record_fields(bus_.now(), "scc", kind, std::move(fields));
}

DrivingTaskProcess* Supervisor::find(std::uint64_t process_id) {
  if (process_id == 0 || process_id > processes_.size()) return nullptr;
  return &processes_[process_id - 1];
}

TimerHandle Supervisor::arm(std::size_t process, std::optional<std::size_t> stage, Timestamp at,
                            TimerKind kind) {
  const TimerHandle h = bus_.set_timer(at, kind);
  timer_roles_.emplace(h.id, TimerRole{process, stage});
  ++timers_armed_;
  if (stage) {
    stage_timers_[process][*stage] = h;
  } else {
    guard_timers_[process] = h;
  }
  return h;
}

void Supervisor::set_phase(DrivingTaskProcess& p, Phase phase) {
  if (p.phase == phase) return;
  note("transition", {{"proc", std::to_string(p.id)},
                      {"from", std::string(to_string(p.phase))},
                      {"to", std::string(to_string(phase))}});
  p.phase = phase;
  p.history.push_back(phase);
}

DrivingTaskProcess& Supervisor::start_driving_task(const DrivingEvent& event,
                                                   const VehicleState& vehicle) {
  validate_event(event);
  if (event.kind != tsims_.front().profile.scenario) {
    throw DomainError("supervisor: event kind does not match the TSIM chain");
  }
  if (event.detected_at < bus_.now()) throw SchedulingError("event detected in the past");

  const std::size_t index = processes_.size();
  DrivingTaskProcess p;
  p.id = index + 1;
  p.event = event;
  p.estimate = compute_time_bounds(config_.control, event, vehicle);
  p.budgets = allocate_budgets(p.bounds().tte(), tsims_.size(), config_.policy);
  Timestamp deadline = p.bounds().origin();
  for (std::size_t i = 0; i < tsims_.size(); ++i) {
    deadline += p.budgets[i];
    p.tasks.emplace_back(next_task_id_++, event.id, i, p.budgets[i], deadline);
  }
  p.outcomes.resize(tsims_.size());
  p.history.push_back(Phase::Scheduled);
  processes_.push_back(std::move(p));
  stage_timers_.emplace_back(tsims_.size());
  guard_timers_.emplace_back();

  DrivingTaskProcess& proc = processes_.back();
  const TimeBounds& b = proc.bounds();
  std::string budgets;
  for (std::size_t i = 0; i < proc.budgets.size(); ++i) {
    if (i) budgets += ',';
    budgets += std::to_string(proc.budgets[i].count());
  }
  note("bounds", {{"proc", std::to_string(proc.id)},
                  {"event", std::to_string(event.id)},
                  {"tte", std::to_string(b.tte().count())},
                  {"tth", std::to_string(b.tth().count())},
                  {"smod_tth", detail::format_double(proc.estimate.smod_tth_s)},
                  {"dmod_tth", detail::format_double(proc.estimate.dmod_tth_s)},
                  {"zero_budget", proc.estimate.zero_budget ? "1" : "0"}});
  note("allocate", {{"proc", std::to_string(proc.id)},
                    {"policy", config_.policy.str()},
                    {"budgets", budgets}});

  if (uses_guard()) arm(index, std::nullopt, b.tth_at(), TimerKind::TthGuard);
  if (uses_stage_timers()) {
    // Provisional per-stage deadlines; each is re-armed when its stage starts.
    for (std::size_t i = 1; i < tsims_.size(); ++i) {
      arm(index, i, proc.tasks[i].deadline_at(), TimerKind::TteExpiry);
    }
    if (proc.estimate.zero_budget) {
      fall_back(index, 0);
      return processes_[index];
    }
  }
  set_phase(proc, Phase::Opportunistic);
  start_stage(index, 0, truth_observation(event.kind, event.object_truth, event.cooperative));
  return processes_[index];
}

void Supervisor::start_stage(std::size_t index, std::size_t stage, const Observation& input) {
  DrivingTaskProcess& p = processes_[index];
  TsimTask& task = p.tasks[stage];
  const Tsim& tsim = tsims_[stage];

  ExecutionPolicy exec;
  if (config_.architecture != Architecture::Savvy) exec.forced_level = tsim.profile.top_level();
  exec.discard_late = uses_stage_timers();

  if (uses_stage_timers()) {
    task.reschedule(bus_.now() + task.budget());
    if (auto& provisional = stage_timers_[index][stage]) {
      bus_.cancel(*provisional);
      timer_roles_.erase(provisional->id);
      provisional.reset();
    }
  }

  // One stream per (process, stage), so paired runs draw identically.
  Rng rng(Rng::derive(Rng::derive(seed_, p.id), stage));
  const TaskOutcome outcome = execute_task(tsim, teds_[stage], task, p.id, input, bus_, rng, exec);
  p.outcomes[stage] = outcome;

  if (outcome.kind == TaskOutcome::Kind::NoFeasibleLevel) {
    fall_back(index, stage);
    return;
  }
  // Armed after the result is published: a result landing exactly on the
  // deadline is delivered first.
  if (uses_stage_timers()) arm(index, stage, task.deadline_at(), TimerKind::TteExpiry);
}

void Supervisor::on_result(const TsimReport& report) {
  DrivingTaskProcess* p = find(report.process_id);
  if (!p) return;
  const std::size_t index = p->id - 1;
  TsimTask& task = p->tasks.at(report.stage);
  if (p->phase != Phase::Opportunistic || task.status() != TaskStatus::Running) {
    note("ignored", {{"proc", std::to_string(p->id)},
                     {"task", std::to_string(report.task_id)},
                     {"reason", "phase_" + std::string(to_string(p->phase))}});
    return;
  }
  task.deliver(report.result.level);
  if (auto& t = stage_timers_[index][report.stage]) {
    bus_.cancel(*t);
    timer_roles_.erase(t->id);
    t.reset();
  }

  if (report.stage + 1 < tsims_.size()) {
    start_stage(index, report.stage + 1, report.result.observed);
    return;
  }
  p->final_result = report.result;
  const ActionSpec action = decide_action(report.result, config_.ladder);
  issue(*p, ActuatorCommand{action, bus_.now(), CommandSource::dmod(report.result.observed.row),
                            p->id});
}

void Supervisor::record_command(DrivingTaskProcess& p, const ActuatorCommand& command) {
  if (!p.final_command) p.final_command = command;
  commands_.push_back(command);
  note("command", {{"proc", std::to_string(p.id)},
                   {"action", command.action.str()},
                   {"src", command.source.str()},
                   {"at", std::to_string(to_ms(command.issued_at))}});
}

void Supervisor::issue(DrivingTaskProcess& p, ActuatorCommand command) {
  record_command(p, command);
  Message msg;
  msg.summary = command.action.str() + ",src=" + command.source.str() +
                ",proc=" + std::to_string(p.id);
  msg.body = command;
  bus_.publish(Topic::Actuators, std::move(msg), command.issued_at);
}

void Supervisor::cancel_stage_timers(std::size_t index) {
  for (auto& t : stage_timers_[index]) {
    if (!t) continue;
    bus_.cancel(*t);
    timer_roles_.erase(t->id);
    t.reset();
  }
}

void Supervisor::cancel_all_timers(std::size_t index) {
  cancel_stage_timers(index);
  if (auto& g = guard_timers_[index]) {
    bus_.cancel(*g);
    timer_roles_.erase(g->id);
    g.reset();
  }
}

void Supervisor::fall_back(std::size_t index, std::size_t stage) {
  DrivingTaskProcess& p = processes_[index];
  if (p.phase == Phase::SafeFallback || p.phase == Phase::Completed) return;
  for (auto& task : p.tasks) {
    if (task.status() == TaskStatus::Running) task.time_out();
  }
  cancel_stage_timers(index);
  p.fallback_stage = stage;
  set_phase(p, Phase::SafeFallback);
  const SmodFiring firing = fire_smod(tsims_[stage], p.bounds(), p.id, bus_.now(), bus_);
  record_command(p, firing.command);
}

void Supervisor::on_guard(std::size_t index) {
  DrivingTaskProcess& p = processes_[index];
  const bool on_time = p.final_command && p.final_command->issued_at <= p.bounds().tth_at();
  if (on_time) return;

  if (config_.architecture == Architecture::AllOrNothing) {
    // Emergency override: the baseline's result is not in, stop now.
    p.guard_engaged = true;
    set_phase(p, Phase::SafeFallback);
    issue(p, ActuatorCommand{tsims_.front().smod.action, bus_.now(), CommandSource::guard(), p.id});
    return;
  }

  ++p.faults;
  note("fault", {{"proc", std::to_string(p.id)},
                 {"kind", "safety_violation"},
                 {"reason", p.final_command ? "late_command" : "no_command"}});
  if (!p.final_command) {
    p.guard_engaged = true;
    cancel_stage_timers(index);
    set_phase(p, Phase::SafeFallback);
    issue(p, ActuatorCommand{tsims_.front().smod.action, bus_.now(), CommandSource::guard(), p.id});
  }
}

bool Supervisor::on_timer(const TimerHandle& timer) {
  const auto it = timer_roles_.find(timer.id);
  if (it == timer_roles_.end()) return false;
  const TimerRole role = it->second;
  timer_roles_.erase(it);

  if (!role.stage) {
    guard_timers_[role.process].reset();
    on_guard(role.process);
    return true;
  }
  stage_timers_[role.process][*role.stage].reset();
  DrivingTaskProcess& p = processes_[role.process];
  const TaskStatus st = p.tasks[*role.stage].status();
  if (st == TaskStatus::Running || st == TaskStatus::Pending) {
    note("tte_expired", {{"proc", std::to_string(p.id)}, {"stage", std::to_string(*role.stage)}});
    fall_back(role.process, *role.stage);
  }
  return true;
}

void Supervisor::on_actuator(const ActuatorCommand& command) {
  DrivingTaskProcess* p = find(command.process_id);
  if (!p || p->phase == Phase::Completed) return;
  set_phase(*p, Phase::Completed);
  cancel_all_timers(p->id - 1);
}

}  // namespace tpqd
