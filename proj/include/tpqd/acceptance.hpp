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

#include <string>
#include <vector>

namespace tpqd {

inline constexpr int kCriterionCount = 8;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured values next to their thresholds

  /// "criterion <id> PASS <name>: <detail>"
  std::string line() const;
};

/// Runs one acceptance criterion (1..kCriterionCount) with its oracle.
/// `work_dir` hosts the files written by the determinism check; empty means a
/// fresh directory under the system temp path, removed afterwards.
CriterionResult check_criterion(int id, const std::string& work_dir = {});

std::vector<CriterionResult> check_all(const std::string& work_dir = {});

}  // namespace tpqd
