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

#include "tpqd/domain.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <utility>

#include "text_util.hpp"

namespace tpqd {
namespace {

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 4> kKindNames{{
    {ScenarioKind::ObstacleAvoidance, "obstacle_avoidance"},
    {ScenarioKind::IntersectionCrossing, "intersection_crossing"},
    {ScenarioKind::Overtaking, "overtaking"},
    {ScenarioKind::CrashAvoidance, "crash_avoidance"},
}};

constexpr std::array<std::pair<ActionCommand, std::string_view>, 11> kCommandNames{{
    {ActionCommand::Brake, "brake"},
    {ActionCommand::Beep, "beep"},
    {ActionCommand::Continue, "continue"},
    {ActionCommand::ContinueSlowly, "continue_slowly"},
    {ActionCommand::SteerAway, "steer_away"},
    {ActionCommand::GiveWay, "give_way"},
    {ActionCommand::Stop, "stop"},
    {ActionCommand::SlowDown, "slow_down"},
    {ActionCommand::Maneuver, "maneuver"},
    {ActionCommand::Agreement, "agreement"},
    {ActionCommand::ContinueLater, "continue_later"},
}};

constexpr std::array<std::pair<CooperativeSensing, std::string_view>, 4> kCoopNames{{
    {CooperativeSensing::None, "none"},
    {CooperativeSensing::RsuShort, "rsu_short"},
    {CooperativeSensing::RsuLong, "rsu_long"},
    {CooperativeSensing::Active, "active"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view text) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  return std::nullopt;
}

using enum ActionCommand;

QualityLevel row(ScenarioKind kind, int index, std::string label,
                 std::vector<ActionCommand> commands) {
  return QualityLevel{kind, index, std::move(label), ActionSpec(std::move(commands))};
}

}  // namespace

std::string_view to_string(ScenarioKind kind) { return name_of(kKindNames, kind); }
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
  return value_of(kKindNames, text);
}

std::string_view to_string(ActionCommand command) { return name_of(kCommandNames, command); }
std::optional<ActionCommand> parse_action_command(std::string_view text) {
  return value_of(kCommandNames, text);
}

std::string_view to_string(CooperativeSensing flags) { return name_of(kCoopNames, flags); }
std::optional<CooperativeSensing> parse_cooperative_sensing(std::string_view text) {
  return value_of(kCoopNames, text);
}

ActionSpec::ActionSpec(std::vector<ActionCommand> commands) : commands_(std::move(commands)) {
  if (commands_.empty()) throw DomainError("action spec must contain at least one command");
}

bool ActionSpec::contains(ActionCommand c) const {
  return std::find(commands_.begin(), commands_.end(), c) != commands_.end();
}

std::string ActionSpec::str() const {
  std::string out;
  for (std::size_t i = 0; i < commands_.size(); ++i) {
    if (i) out += ',';
    out += to_string(commands_[i]);
  }
  return out;
}

std::optional<ActionSpec> ActionSpec::parse(std::string_view text) {
  std::vector<ActionCommand> commands;
  for (auto part : detail::split(text, ',')) {
    part = detail::trim(part);
    auto c = parse_action_command(part);
    if (!c) return std::nullopt;
    commands.push_back(*c);
  }
  if (commands.empty()) return std::nullopt;
  return ActionSpec(std::move(commands));
}

LevelLadder load_level_ladder(ScenarioKind kind) {
  using K = ScenarioKind;
  switch (kind) {
    case K::ObstacleAvoidance:
      return {
          row(kind, 1, "An object detected at safety distance", {Brake, Beep}),
          row(kind, 2, "Non obstructive shaped (flat, small, short) object detected", {Continue}),
          row(kind, 3, "Non obstructive material object detected (rubber, herb plant, snow)",
              {ContinueSlowly}),
          row(kind, 4, "Obstructive avoidable object detected", {Beep, SteerAway}),
          row(kind, 5, "Obstructive unavoidable material object detected", {Brake, Beep}),
          row(kind, 6, "Obstructive mobile object detected (auto, animal)",
              {Brake, GiveWay, ContinueLater}),
          row(kind, 7, "Obstructive rational object (human) detected",
              {Brake, Stop, ContinueLater}),
      };
    case K::IntersectionCrossing:
      return {
          row(kind, 1, "No cooperative sensing", {Brake}),
          row(kind, 2, "Cooperative sensing (e.g, RSU) short distance", {Brake}),
          row(kind, 3, "Cooperative sensing (e.g, RSU) long distance", {Continue}),
          row(kind, 4, "Cooperative active sensing", {Agreement}),
      };
    case K::Overtaking:
      return {
          row(kind, 1, "No cooperative sensing", {Continue}),
          row(kind, 2, "Cooperative sensing (e.g, RSU) short distance", {SlowDown}),
          row(kind, 3, "Cooperative sensing (e.g, RSU) long distance", {Maneuver}),
          row(kind, 4, "Cooperative active sensing", {Agreement}),
      };
    case K::CrashAvoidance:
      return {
          row(kind, 1, "No cooperative sensing", {Brake}),
          row(kind, 2, "Cooperative sensing (e.g, RSU) short front distance", {Stop}),
          row(kind, 3, "Cooperative sensing (e.g, RSU) long front distance", {SlowDown}),
          row(kind, 4, "Cooperative sensing (e.g, RSU) short front and back distance", {Maneuver}),
          row(kind, 5, "Cooperative active sensing", {Agreement}),
      };
  }
  throw DomainError("unknown scenario kind");
}

int ladder_size(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ObstacleAvoidance: return 7;
    case ScenarioKind::IntersectionCrossing: return 4;
    case ScenarioKind::Overtaking: return 4;
    case ScenarioKind::CrashAvoidance: return 5;
  }
  return 0;
}

void validate_ladder(const LevelLadder& ladder) {
  if (ladder.empty()) throw DomainError("ladder is empty");
  const ScenarioKind kind = ladder.front().scenario;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto& level = ladder[i];
    if (level.scenario != kind) throw DomainError("ladder mixes scenario kinds");
    if (level.index != static_cast<int>(i) + 1) {
      throw DomainError("ladder indices must be contiguous from 1");
    }
    if (level.action.empty()) throw DomainError("ladder level has no action");
  }
  if (static_cast<int>(ladder.size()) != ladder_size(kind)) {
    throw DomainError("ladder length does not match the scenario kind");
  }
}

int reachable_level(ScenarioKind kind, CooperativeSensing flags) {
  const int top = ladder_size(kind);
  if (kind == ScenarioKind::ObstacleAvoidance) return top;
  switch (flags) {
    case CooperativeSensing::None: return 1;
    case CooperativeSensing::RsuShort: return 2;
    case CooperativeSensing::RsuLong: return top - 1;
    case CooperativeSensing::Active: return top;
  }
  return 1;
}

TimeBounds::TimeBounds(Timestamp origin, Duration tte, Duration tth, Duration smod_wcet)
    : origin_(origin), tte_(tte), tth_(tth), smod_wcet_(smod_wcet) {
  if (tte < Duration::zero()) throw DomainError("time bounds: tte must be >= 0");
  if (smod_wcet < Duration::zero()) throw DomainError("time bounds: smod_wcet must be >= 0");
  if (tte > tth) throw DomainError("time bounds: tte must not exceed tth");
  if (tte + smod_wcet > tth) throw DomainError("time bounds: tte + smod_wcet must fit within tth");
}

void validate_event(const DrivingEvent& event) {
  if (!(event.object_distance > 0.0)) throw DomainError("event: object_distance must be > 0");
  if (!is_leaf(event.object_truth)) throw DomainError("event: object truth must be a leaf class");
  if (event.kind == ScenarioKind::ObstacleAvoidance &&
      event.cooperative != CooperativeSensing::None) {
    throw DomainError("event: cooperative sensing flags only apply to cooperative scenarios");
  }
}

std::string CommandSource::str() const {
  switch (kind) {
    case Kind::DMod: return "dmod:L" + std::to_string(level);
    case Kind::SMod: return "smod";
    case Kind::Guard: return "guard";
  }
  return "?";
}

}  // namespace tpqd
