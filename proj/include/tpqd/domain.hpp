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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpqd/taxonomy.hpp"
#include "tpqd/time.hpp"

namespace tpqd {

/// Raised when a value violates a domain invariant.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ScenarioKind : std::uint8_t {
  ObstacleAvoidance,
  IntersectionCrossing,
  Overtaking,
  CrashAvoidance,
};

inline constexpr ScenarioKind kAllScenarioKinds[] = {
    ScenarioKind::ObstacleAvoidance, ScenarioKind::IntersectionCrossing,
    ScenarioKind::Overtaking, ScenarioKind::CrashAvoidance};

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

enum class ActionCommand : std::uint8_t {
  Brake,
  Beep,
  Continue,
  ContinueSlowly,
  SteerAway,
  GiveWay,
  Stop,
  SlowDown,
  Maneuver,
  Agreement,
  ContinueLater,
};

std::string_view to_string(ActionCommand command);
std::optional<ActionCommand> parse_action_command(std::string_view text);

/// Ordered, non-empty list of actuator commands.
class ActionSpec {
 public:
  ActionSpec() = default;
  /// Throws DomainError on an empty list.
  explicit ActionSpec(std::vector<ActionCommand> commands);

  std::span<const ActionCommand> commands() const { return commands_; }
  bool contains(ActionCommand c) const;
  bool empty() const { return commands_.empty(); }

  /// "brake,beep"
  std::string str() const;
  /// Inverse of str(); nullopt on unknown or empty input.
  static std::optional<ActionSpec> parse(std::string_view text);

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;

 private:
  std::vector<ActionCommand> commands_;
};

/// One rung of a degradation ladder.
struct QualityLevel {
  ScenarioKind scenario = ScenarioKind::ObstacleAvoidance;
  int index = 1;
  std::string sensing_label;
  ActionSpec action;

  friend bool operator==(const QualityLevel&, const QualityLevel&) = default;
};

using LevelLadder = std::vector<QualityLevel>;

/// The default decision table for `kind`, in level order.
LevelLadder load_level_ladder(ScenarioKind kind);

int ladder_size(ScenarioKind kind);

/// Throws DomainError unless `ladder` is a contiguous 1..N ladder of one kind
/// with non-empty actions.
void validate_ladder(const LevelLadder& ladder);

enum class CooperativeSensing : std::uint8_t { None, RsuShort, RsuLong, Active };

std::string_view to_string(CooperativeSensing flags);
std::optional<CooperativeSensing> parse_cooperative_sensing(std::string_view text);

/// Highest ladder row the available cooperative sensing can support.
/// Obstacle avoidance has no cooperative rows and is never capped.
int reachable_level(ScenarioKind kind, CooperativeSensing flags);

/// The [TTE, TTH] interval of one driving task, relative to `origin`.
class TimeBounds {
 public:
  TimeBounds() = default;
  /// Throws DomainError unless 0 <= tte, tte + smod_wcet <= tth.
  TimeBounds(Timestamp origin, Duration tte, Duration tth, Duration smod_wcet);

  Timestamp origin() const { return origin_; }
  Duration tte() const { return tte_; }
  Duration tth() const { return tth_; }
  Duration smod_wcet() const { return smod_wcet_; }

  Timestamp tte_at() const { return origin_ + tte_; }
  Timestamp tth_at() const { return origin_ + tth_; }

  friend bool operator==(const TimeBounds&, const TimeBounds&) = default;

 private:
  Timestamp origin_{};
  Duration tte_{};
  Duration tth_{};
  Duration smod_wcet_{};
};

struct DrivingEvent {
  std::uint64_t id = 0;
  ScenarioKind kind = ScenarioKind::ObstacleAvoidance;
  Timestamp detected_at{};
  ObjectClass object_truth = ObjectClass::Debris;
  double object_distance = 0.0;  // meters
  double closing_speed = 0.0;    // m/s, vehicle speed minus object speed
  CooperativeSensing cooperative = CooperativeSensing::None;
};

/// Throws DomainError on a non-positive distance, a non-leaf truth, or
/// cooperative flags on an obstacle-avoidance event.
void validate_event(const DrivingEvent& event);

struct CommandSource {
  enum class Kind : std::uint8_t { DMod, SMod, Guard };
  Kind kind = Kind::SMod;
  int level = 0;  // ladder row acted on; 0 unless kind == DMod

  static CommandSource dmod(int level) { return {Kind::DMod, level}; }
  static CommandSource smod() { return {Kind::SMod, 0}; }
  static CommandSource guard() { return {Kind::Guard, 0}; }

  std::string str() const;
  friend bool operator==(const CommandSource&, const CommandSource&) = default;
};

struct ActuatorCommand {
  ActionSpec action;
  Timestamp issued_at{};
  CommandSource source;
  std::uint64_t process_id = 0;
};

}  // namespace tpqd
