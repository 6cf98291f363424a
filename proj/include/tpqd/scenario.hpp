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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpqd/domain.hpp"
#include "tpqd/supervisor.hpp"
#include "tpqd/tsim.hpp"

namespace tpqd {

struct VehicleSpec {
  double speed = 10.0;     // m/s
  double max_decel = 5.0;  // m/s^2

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct ObjectSpec {
  ObjectClass truth = ObjectClass::Debris;
  double distance = 60.0;  // m ahead of the vehicle at t = 0
  double speed = 0.0;      // m/s, negative means oncoming
  bool adjacent = false;

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct DetectionSpec {
  double distance = 60.0;  // preliminary detection fires once the gap is this small
  CooperativeSensing cooperative = CooperativeSensing::None;

  friend bool operator==(const DetectionSpec&, const DetectionSpec&) = default;
};

struct RunConstants {
  ControlConstants control;
  double planning_quantile = TedEstimator::kDefaultQuantile;
  bool guard = true;  // AllOrNothing emergency path
  double slow_factor = 0.5;
  Duration dt{10};           // world tick
  Duration max_time{60000};  // hard stop for a run

  friend bool operator==(const RunConstants&, const RunConstants&) = default;
};

struct ScenarioSpec {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::ObstacleAvoidance;
  Architecture architecture = Architecture::Savvy;
  std::string description;
  VehicleSpec vehicle;
  std::optional<ObjectSpec> object;
  DetectionSpec detection;
  RunConstants constants;
  SchedulingPolicy policy;
  std::vector<Tsim> tsims;
  LevelLadder ladder;  // empty means the default table for `kind`

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Sense, Plan and Act with the shipped default profiles; each SMod issues
/// the L1 action of the ladder.
std::vector<Tsim> default_tsims(ScenarioKind kind, Duration smod_wcet = Duration(300));

/// A complete spec for `kind` with default constants and one object.
ScenarioSpec default_scenario(ScenarioKind kind);

/// Every violated rule, empty if the spec is runnable.
std::vector<std::string> scenario_errors(const ScenarioSpec& spec);

/// Throws DomainError listing every violated rule.
void validate_scenario(const ScenarioSpec& spec);

inline constexpr std::string_view kIncidentIds[] = {"I1", "I2", "I3", "I4", "I5", "I6", "I7"};

/// Calibrated replay of an incident. Throws DomainError on an unknown id.
ScenarioSpec incident_fixture(std::string_view id);

}  // namespace tpqd
