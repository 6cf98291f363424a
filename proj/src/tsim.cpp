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

#include "tpqd/tsim.hpp"

#include <algorithm>
#include <string>

namespace tpqd {
namespace {

void trace_task(EventBus& bus, const Tsim& tsim, const TsimTask& task, std::string_view transition,
                std::initializer_list<std::pair<std::string_view, std::string>> extra = {}) {
  Trace* trace = bus.trace();
  if (!trace) return;
  std::vector<std::pair<std::string, std::string>> fields{
      {"task", std::to_string(task.id())},
      {"event", std::to_string(task.event_id())},
      {"transition", std::string(transition)},
  };
  for (const auto& [k, v] : extra) fields.emplace_back(std::string(k), v);
  trace->record_fields(bus.now(), "tsim." + tsim.id, "task", std::move(fields));
}

}  // namespace

TedEstimator::TedEstimator(const AnytimeProfile& profile, double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("TED: planning quantile must be in (0, 1)");
  for (int level = 1; level <= profile.top_level(); ++level) {
    const Duration est = latency_quantile(profile.at(level).latency, q);
    if (!estimates_.empty() && est < estimates_.back()) {
      throw DomainError("TED: monotone cost violated, planning-quantile latency of L" +
                        std::to_string(level) + " is below L" + std::to_string(level - 1));
    }
    estimates_.push_back(est);
  }
}

Duration TedEstimator::estimate(int level) const {
  if (level < 1 || level > top_level()) throw DomainError("TED: no level " + std::to_string(level));
  return estimates_[static_cast<std::size_t>(level - 1)];
}

std::optional<ModelConfig> tune(const TedEstimator& ted, Duration budget) {
  const auto& est = ted.estimates();
  // Estimates are non-decreasing, so the feasible levels form a prefix.
  const auto fits = std::upper_bound(est.begin(), est.end(), budget) - est.begin();
  if (fits == 0) return std::nullopt;
  return ModelConfig{static_cast<int>(fits), 0};
}

void validate_tsim(const Tsim& tsim, ScenarioKind kind) {
  if (tsim.id.empty()) throw DomainError("tsim: id must not be empty");
  if (tsim.profile.scenario != kind) {
    throw DomainError("tsim " + tsim.id + ": profile ladder does not match the scenario kind");
  }
  validate_profile(tsim.profile);
  if (tsim.smod.action.empty()) throw DomainError("tsim " + tsim.id + ": SMod needs an action");
  if (tsim.smod.wcet < Duration::zero()) throw DomainError("tsim " + tsim.id + ": SMod wcet must be >= 0");
}

std::string_view to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Running: return "running";
    case TaskStatus::Delivered: return "delivered";
    case TaskStatus::TimedOutToSMod: return "timed_out_to_smod";
  }
  return "?";
}

std::string_view to_string(TaskOutcome::Kind kind) {
  switch (kind) {
    case TaskOutcome::Kind::Delivering: return "delivering";
    case TaskOutcome::Kind::WillTimeOut: return "will_time_out";
    case TaskOutcome::Kind::NoFeasibleLevel: return "no_feasible_level";
  }
  return "?";
}

TsimTask::TsimTask(std::uint64_t id, std::uint64_t event_id, std::size_t stage, Duration budget,
                   Timestamp deadline_at)
    : id_(id), event_id_(event_id), stage_(stage), budget_(budget), deadline_at_(deadline_at) {
  if (budget < Duration::zero()) throw DomainError("task budget must be >= 0");
}

void TsimTask::reschedule(Timestamp deadline_at) {
  if (status_ != TaskStatus::Pending) throw TaskStateError("task already started");
  deadline_at_ = deadline_at;
}

void TsimTask::start(Timestamp at) {
  if (status_ != TaskStatus::Pending) {
    throw TaskStateError("task " + std::to_string(id_) + " is " + std::string(to_string(status_)) +
                         ", expected pending");
  }
  started_at_ = at;
  status_ = TaskStatus::Running;
}

void TsimTask::deliver(int level) {
  if (status_ != TaskStatus::Running) throw TaskStateError("deliver on a task that is not running");
  status_ = TaskStatus::Delivered;
  delivered_level_ = level;
}

void TsimTask::time_out() {
  if (status_ != TaskStatus::Running) throw TaskStateError("time out on a task that is not running");
  status_ = TaskStatus::TimedOutToSMod;
}

TaskOutcome execute_task(const Tsim& tsim, const TedEstimator& ted, TsimTask& task,
                         std::uint64_t process_id, const Observation& input, EventBus& bus,
                         Rng& rng, const ExecutionPolicy& policy) {
  task.start(bus.now());
  trace_task(bus, tsim, task, "start", {{"budget", std::to_string(to_ms(task.budget()))}});

  TaskOutcome outcome;
  outcome.config = policy.forced_level ? std::optional<ModelConfig>(ModelConfig{*policy.forced_level, 0})
                                       : tune(ted, task.budget());
  if (!outcome.config) {
    outcome.kind = TaskOutcome::Kind::NoFeasibleLevel;
    outcome.report_at = bus.now();
    task.time_out();
    trace_task(bus, tsim, task, "no_feasible_level");
    return outcome;
  }

  outcome.result = infer(tsim.profile, *outcome.config, input, rng);
  const Timestamp done_at = bus.now() + outcome.result.elapsed;
  trace_task(bus, tsim, task, "tuned",
             {{"level", std::to_string(outcome.config->level)},
              {"estimate", std::to_string(to_ms(ted.estimate(outcome.config->level)))}});

  if (policy.discard_late && done_at > task.deadline_at()) {
    outcome.kind = TaskOutcome::Kind::WillTimeOut;
    outcome.report_at = task.deadline_at();
    return outcome;
  }

  outcome.kind = TaskOutcome::Kind::Delivering;
  outcome.report_at = done_at;
  Message msg;
  msg.summary = "proc=" + std::to_string(process_id) + ",task=" + std::to_string(task.id()) +
                ",level=" + std::to_string(outcome.result.level) +
                ",observed=" + std::string(to_string(outcome.result.observed.object)) +
                ",row=" + std::to_string(outcome.result.observed.row) +
                ",elapsed=" + std::to_string(to_ms(outcome.result.elapsed));
  msg.body = TsimReport{process_id, task.id(), task.stage(), outcome.result};
  bus.publish(Topic::TsimResults, std::move(msg), done_at);
  return outcome;
}

SmodFiring fire_smod(const Tsim& tsim, const TimeBounds& bounds, std::uint64_t process_id,
                     Timestamp trigger, EventBus& bus) {
  SmodFiring firing;
  firing.command = ActuatorCommand{tsim.smod.action, trigger + tsim.smod.wcet, CommandSource::smod(),
                                   process_id};
  firing.safety_violation = firing.command.issued_at > bounds.tth_at();
  Message msg;
  msg.summary = firing.command.action.str() + ",src=smod,proc=" + std::to_string(process_id);
  msg.body = firing.command;
  bus.publish(Topic::Actuators, std::move(msg), firing.command.issued_at);
  return firing;
}

}  // namespace tpqd
