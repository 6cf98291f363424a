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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tpqd/scenario.hpp"
#include "tpqd/simulation.hpp"
#include "tpqd/supervisor.hpp"
#include "tpqd/trace.hpp"

namespace tpqd {

struct RunConfig {
  std::vector<ScenarioSpec> scenarios;
  std::uint64_t first_seed = 1;
  std::uint64_t seed_count = 1;  // 0 runs nothing
  /// Empty: each scenario runs under its own architecture.
  std::vector<Architecture> architectures;
  std::optional<SchedulingPolicy> policy;
  std::string out_dir;  // empty: no files written
  TraceLevel trace_level = TraceLevel::Summary;
  unsigned jobs = 1;
};

/// Outcome counts of one (scenario, architecture) cell.
struct VerdictCounts {
  std::array<std::uint64_t, 4> by_outcome{};  // indexed by Outcome

  std::uint64_t runs() const;
  std::uint64_t count(Outcome o) const { return by_outcome[static_cast<std::size_t>(o)]; }
  /// Most frequent outcome; ties go to the more severe one.
  Outcome dominant() const;
  friend bool operator==(const VerdictCounts&, const VerdictCounts&) = default;
};

struct ArchMetrics {
  std::uint64_t runs = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t collisions = 0;
  std::uint64_t faults = 0;
  std::uint64_t level_sum = 0;  // over runs acting on a DMod result
  std::uint64_t level_runs = 0;
  std::int64_t latency_sum_ms = 0;  // over runs with a command
  std::uint64_t latency_runs = 0;

  double fallback_rate() const;
  double collision_rate() const;
  std::optional<double> mean_level() const;
  std::optional<double> mean_latency_ms() const;
  friend bool operator==(const ArchMetrics&, const ArchMetrics&) = default;
};

/// Commutative, associative fold over run verdicts. Only integer sums are
/// kept so merge order never changes the result.
struct MetricsSummary {
  std::map<Architecture, ArchMetrics> by_arch;
  std::map<std::pair<std::string, Architecture>, VerdictCounts> verdicts;

  void add(const std::string& scenario, Architecture arch, const Verdict& v);
  void merge(const MetricsSummary& other);
  std::uint64_t savvy_faults() const;
  bool empty() const { return by_arch.empty(); }
  friend bool operator==(const MetricsSummary&, const MetricsSummary&) = default;
};

struct Report {
  std::string text;
  std::string metrics_csv;
  std::string verdicts_csv;
};

/// Deterministic tables: one metrics row per architecture, and a verdict
/// matrix of scenarios by architecture.
Report emit_report(const MetricsSummary& summary);

struct BatchResult {
  MetricsSummary summary;
  Report report;
  std::vector<std::string> io_errors;  // one per failed file; the batch continues
  std::uint64_t runs = 0;

  /// Nonzero iff any run under the savvy architecture raised a guard fault.
  int exit_code() const { return summary.savvy_faults() > 0 ? 1 : 0; }
};

/// Runs every (scenario, architecture, seed) cell, writing one trace file per
/// run and the report files when out_dir is set. Throws DomainError on an
/// invalid config before anything runs.
BatchResult run_batch(const RunConfig& config);

/// "<out>/<scenario>/<arch>/seed-<n>.trace"
std::string trace_path(const std::string& out_dir, const std::string& scenario, Architecture arch,
                       std::uint64_t seed);

}  // namespace tpqd
