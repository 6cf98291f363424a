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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpqd/anytime.hpp"
#include "tpqd/domain.hpp"
#include "tpqd/event_bus.hpp"
#include "tpqd/time.hpp"

namespace tpqd {

/// Design-time safe-operational rule of a TSIM.
struct SModSpec {
  ActionSpec action;
  Duration wcet{};

  friend bool operator==(const SModSpec&, const SModSpec&) = default;
};

/// Delivery-time estimation: the planning quantile of each level's latency.
class TedEstimator {
 public:
  static constexpr double kDefaultQuantile = 0.95;

  /// Throws DomainError if q is outside (0, 1) or the q-quantile is not
  /// non-decreasing in level.
  explicit TedEstimator(const AnytimeProfile& profile, double q = kDefaultQuantile);

  double quantile() const { return q_; }
  Duration estimate(int level) const;
  int top_level() const { return static_cast<int>(estimates_.size()); }
  const std::vector<Duration>& estimates() const { return estimates_; }

 private:
  double q_;
  std::vector<Duration> estimates_;  // estimates_[0] is L1
};

/// Highest level whose estimate fits `budget`; nullopt means no feasible level.
std::optional<ModelConfig> tune(const TedEstimator& ted, Duration budget);

/// Time-sensitive intelligent module: one tunable DMod plus its SMod.
struct Tsim {
  std::string id;  // "sense", "plan", "act", or custom
  AnytimeProfile profile;
  SModSpec smod;

  friend bool operator==(const Tsim&, const Tsim&) = default;
};

/// Throws DomainError if the TSIM is malformed for `kind`.
void validate_tsim(const Tsim& tsim, ScenarioKind kind);

/// Raised on an illegal task state transition.
class TaskStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class TaskStatus : std::uint8_t { Pending, Running, Delivered, TimedOutToSMod };

std::string_view to_string(TaskStatus status);

/// A budgeted unit of work on one TSIM.
class TsimTask {
 public:
  TsimTask(std::uint64_t id, std::uint64_t event_id, std::size_t stage, Duration budget,
           Timestamp deadline_at);

  std::uint64_t id() const { return id_; }
  std::uint64_t event_id() const { return event_id_; }
  std::size_t stage() const { return stage_; }
  Duration budget() const { return budget_; }
  Timestamp deadline_at() const { return deadline_at_; }
  Timestamp started_at() const { return started_at_; }
  TaskStatus status() const { return status_; }
  std::optional<int> delivered_level() const { return delivered_level_; }
  bool terminal() const {
    return status_ == TaskStatus::Delivered || status_ == TaskStatus::TimedOutToSMod;
  }

  /// Moves a pending task's deadline. Only legal before it starts.
  void reschedule(Timestamp deadline_at);

  void start(Timestamp at);
  void deliver(int level);
  void time_out();

 private:
  std::uint64_t id_;
  std::uint64_t event_id_;
  std::size_t stage_;
  Duration budget_;
  Timestamp deadline_at_;
  Timestamp started_at_{};
  TaskStatus status_ = TaskStatus::Pending;
  std::optional<int> delivered_level_;
};

/// Published on tsim.results when a DMod delivers.
struct TsimReport {
  std::uint64_t process_id = 0;
  std::uint64_t task_id = 0;
  std::size_t stage = 0;
  InferenceResult result;
};

/// How a task is run: TPQD tuning with late-result discard, or a fixed level.
struct ExecutionPolicy {
  std::optional<int> forced_level;  // run this level regardless of budget
  bool discard_late = true;         // drop results that miss deadline_at
};

struct TaskOutcome {
  enum class Kind : std::uint8_t {
    Delivering,       // result published at report_at
    WillTimeOut,      // result discarded; SMod path at deadline_at
    NoFeasibleLevel,  // nothing ran; SMod path now
  };
  Kind kind = Kind::Delivering;
  std::optional<ModelConfig> config;
  InferenceResult result;  // meaningless for NoFeasibleLevel
  Timestamp report_at{};
};

std::string_view to_string(TaskOutcome::Kind kind);

/// Starts `task`, tunes the DMod to its budget and schedules the outcome.
/// In-time results are published to tsim.results; late results never are.
/// Throws TaskStateError unless the task is pending.
TaskOutcome execute_task(const Tsim& tsim, const TedEstimator& ted, TsimTask& task,
                         std::uint64_t process_id, const Observation& input, EventBus& bus,
                         Rng& rng, const ExecutionPolicy& policy = {});

struct SmodFiring {
  ActuatorCommand command;
  bool safety_violation = false;  // issued after origin + tth
};

/// Publishes the SMod action to actuators at trigger + wcet on behalf of the
/// supervisor.
SmodFiring fire_smod(const Tsim& tsim, const TimeBounds& bounds, std::uint64_t process_id,
                     Timestamp trigger, EventBus& bus);

}  // namespace tpqd
