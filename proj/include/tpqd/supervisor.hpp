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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tpqd/anytime.hpp"
#include "tpqd/domain.hpp"
#include "tpqd/event_bus.hpp"
#include "tpqd/tsim.hpp"
#include "tpqd/world.hpp"

namespace tpqd {

enum class Architecture : std::uint8_t {
  Savvy,          // TPQD tuning, per-stage TTE timers, SMod takeover
  AllOrNothing,   // top level always, no TTE timers, optional emergency guard
  SimplexLike,    // top level always, but with the same timers and takeover
};

std::string_view to_string(Architecture arch);
std::optional<Architecture> parse_architecture(std::string_view text);

/// Design-time constants of the control TSIM.
struct ControlConstants {
  double safety_margin_s = 0.5;
  Duration horizon{10000};
  Duration smod_wcet{300};
  bool refine = true;  // closing-speed refinement; may only tighten tth

  friend bool operator==(const ControlConstants&, const ControlConstants&) = default;
};

struct BoundsEstimate {
  TimeBounds bounds;
  bool zero_budget = false;  // tth left no room for any DMod work
  double smod_tth_s = 0.0;   // conservative closed-form estimate
  double dmod_tth_s = 0.0;   // refined estimate (== smod_tth_s when disabled)
};

/// Time bounds for one event. The SMod formula is
///   tth = distance / speed - speed / max_decel - safety_margin,
///   tte = tth - smod_wcet,
/// capped at the horizon. Floors to whole milliseconds.
BoundsEstimate compute_time_bounds(const ControlConstants& ctl, const DrivingEvent& event,
                                   const VehicleState& vehicle);

struct SchedulingPolicy {
  enum class Kind : std::uint8_t { StaticEven, DynamicWeighted };
  Kind kind = Kind::StaticEven;
  std::vector<double> weights;  // one per TSIM for DynamicWeighted

  std::string str() const;
  static std::optional<SchedulingPolicy> parse(std::string_view text);

  friend bool operator==(const SchedulingPolicy&, const SchedulingPolicy&) = default;
};

/// Throws DomainError unless the policy is usable for `stages` TSIMs.
void validate_policy(const SchedulingPolicy& policy, std::size_t stages);

/// Splits tte over `stages` TSIMs. Every share but the last is floored; the
/// last takes the remainder, so the shares sum to tte exactly.
std::vector<Duration> allocate_budgets(Duration tte, std::size_t stages,
                                       const SchedulingPolicy& policy);

/// Ladder row action for the observed (not true) level.
ActionSpec decide_action(const InferenceResult& output, const LevelLadder& ladder);

enum class Phase : std::uint8_t { Scheduled, Opportunistic, SafeFallback, Completed };

std::string_view to_string(Phase phase);

/// Published on sensors.preliminary by the bird's-eye sensing module.
struct PreliminaryDetection {
  DrivingEvent event;
  VehicleState vehicle;
};

struct DrivingTaskProcess {
  std::uint64_t id = 0;
  DrivingEvent event;
  BoundsEstimate estimate;
  std::vector<Duration> budgets;
  std::vector<TsimTask> tasks;
  std::vector<std::optional<TaskOutcome>> outcomes;
  Phase phase = Phase::Scheduled;
  std::vector<Phase> history;
  std::optional<ActuatorCommand> final_command;
  std::optional<InferenceResult> final_result;  // DMod path only
  std::optional<std::size_t> fallback_stage;
  bool guard_engaged = false;
  int faults = 0;

  const TimeBounds& bounds() const { return estimate.bounds; }
};

struct SupervisorConfig {
  Architecture architecture = Architecture::Savvy;
  SchedulingPolicy policy;
  ControlConstants control;
  double planning_quantile = TedEstimator::kDefaultQuantile;
  bool guard_enabled = true;  // only consulted for AllOrNothing
  LevelLadder ladder;
};

/// Safety-critical control: the sole publisher on the actuators topic.
class Supervisor {
 public:
  /// Subscribes to the bus. `tsims` are chained in order.
  Supervisor(EventBus& bus, std::vector<Tsim> tsims, SupervisorConfig config, std::uint64_t seed);

  Supervisor(const Supervisor&) = delete;
  Supervisor& operator=(const Supervisor&) = delete;

  /// Opens a driving task process for `event`; normally driven by a
  /// sensors.preliminary delivery.
  DrivingTaskProcess& start_driving_task(const DrivingEvent& event, const VehicleState& vehicle);

  /// Timer callback. Returns false if the timer belongs to no process.
  bool on_timer(const TimerHandle& timer);

  const std::vector<DrivingTaskProcess>& processes() const { return processes_; }
  const std::vector<ActuatorCommand>& commands() const { return commands_; }
  int faults() const;
  std::size_t timers_armed() const { return timers_armed_; }

  const std::vector<Tsim>& tsims() const { return tsims_; }
  const SupervisorConfig& config() const { return config_; }

 private:
  struct TimerRole {
    std::size_t process;
    std::optional<std::size_t> stage;  // nullopt for the TthGuard
  };

  bool uses_stage_timers() const { return config_.architecture != Architecture::AllOrNothing; }
  bool uses_guard() const {
    return config_.architecture != Architecture::AllOrNothing || config_.guard_enabled;
  }

  TimerHandle arm(std::size_t process, std::optional<std::size_t> stage, Timestamp at,
                  TimerKind kind);
  void start_stage(std::size_t process, std::size_t stage, const Observation& input);
  void on_result(const TsimReport& report);
  void on_actuator(const ActuatorCommand& command);
  void fall_back(std::size_t process, std::size_t stage);
  void on_guard(std::size_t process);
  void record_command(DrivingTaskProcess& p, const ActuatorCommand& command);
  void issue(DrivingTaskProcess& p, ActuatorCommand command);
  void set_phase(DrivingTaskProcess& p, Phase phase);
  void cancel_stage_timers(std::size_t process);
  void cancel_all_timers(std::size_t process);
  DrivingTaskProcess* find(std::uint64_t process_id);
  void note(std::string_view kind, std::vector<std::pair<std::string, std::string>> fields);

  EventBus& bus_;
  std::vector<Tsim> tsims_;
  std::vector<TedEstimator> teds_;
  SupervisorConfig config_;
  std::uint64_t seed_;
  std::vector<DrivingTaskProcess> processes_;
  std::vector<std::vector<std::optional<TimerHandle>>> stage_timers_;
  std::vector<std::optional<TimerHandle>> guard_timers_;
  std::unordered_map<std::uint64_t, TimerRole> timer_roles_;
  std::vector<ActuatorCommand> commands_;
  std::size_t timers_armed_ = 0;
  std::uint64_t next_task_id_ = 1;
};

}  // namespace tpqd
