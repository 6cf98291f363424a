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

#include "tpqd/scenario.hpp"

namespace tpqd {

struct ParseError {
  int line = 0;  // 1-based; 0 when no line applies
  std::string message;

  std::string str() const;
};

struct ScenarioParse {
  std::optional<ScenarioSpec> spec;  // set iff errors is empty
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

/// Line-oriented sections of `key = value`. Missing keys keep the defaults of
/// the scenario kind; every error is reported, not just the first.
ScenarioParse parse_scenario_file(std::string_view text);

/// Normalized text with every key spelled out. With `annotate`, each section
/// carries comments on units and meaning.
std::string emit_scenario_file(const ScenarioSpec& spec, bool annotate = false);

/// Reads and parses `path`. Throws DomainError listing every error.
ScenarioSpec load_scenario_file(const std::string& path);

}  // namespace tpqd
