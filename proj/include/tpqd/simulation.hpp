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
#include <vector>

#include "tpqd/scenario.hpp"
#include "tpqd/supervisor.hpp"
#include "tpqd/trace.hpp"
#include "tpqd/world.hpp"

namespace tpqd {

struct Verdict {
  Outcome outcome = Outcome::SafePass;
  /// Meters. SafeStop: final gap. Collision: negative overrun. SafePass: 0.
  double margin = 0.0;
  std::optional<int> achieved_level;  // perception level behind a DMod command; nullopt on SMod
  std::optional<int> acted_row;       // ladder row the command came from
  std::optional<Duration> decision_latency;  // first command minus detection
  bool detected = false;
  bool fallback = false;
  bool guard_engaged = false;
  int faults = 0;
  bool collided = false;  // physical contact, even under a fault verdict
  Timestamp ended_at{};
};

struct RunResult {
  Verdict verdict;
  Trace trace;
  std::string header;
  std::optional<DrivingTaskProcess> process;
  std::vector<ActuatorCommand> commands;

  std::string serialize() const { return trace.serialize(header); }
};

/// Runs `spec` under its own architecture. Throws DomainError if invalid.
RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                       TraceLevel level = TraceLevel::Summary);

/// Same wiring, forced to the All-or-Nothing architecture.
RunResult run_baseline_all_or_nothing(const ScenarioSpec& spec, std::uint64_t seed,
                                      TraceLevel level = TraceLevel::Summary);

/// Time (ms from start) at which the preliminary detection fires, or nullopt
/// if the object is never within range.
std::optional<Duration> detection_time(const ScenarioSpec& spec);

}  // namespace tpqd
