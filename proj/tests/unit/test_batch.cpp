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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpqd/batch.hpp"

using namespace tpqd;
namespace fs = std::filesystem;

namespace {

Verdict verdict(Outcome o, bool fallback = false, std::optional<int> level = std::nullopt,
                std::optional<Duration> latency = std::nullopt, int faults = 0) {
  Verdict v;
  v.outcome = o;
  v.fallback = fallback;
  v.achieved_level = level;
  v.decision_latency = latency;
  v.faults = faults;
  v.collided = o == Outcome::Collision;
  return v;
}

std::vector<ScenarioSpec> incidents() {
  std::vector<ScenarioSpec> out;
  for (const auto& id : kIncidentIds) out.push_back(incident_fixture(id));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("dominant outcome breaks ties towards severity") {
  VerdictCounts c;
  c.by_outcome = {3, 1, 3, 0};
  CHECK(c.runs() == 7);
  CHECK(c.dominant() == Outcome::Collision);
  c.by_outcome = {2, 2, 0, 0};
  CHECK(c.dominant() == Outcome::SafeStop);
  c.by_outcome = {0, 5, 0, 0};
  CHECK(c.dominant() == Outcome::SafePass);
}

TEST_CASE("metric rates and means") {
  MetricsSummary m;
  m.add("a", Architecture::Savvy, verdict(Outcome::SafeStop, true, std::nullopt, Duration(300)));
  m.add("a", Architecture::Savvy, verdict(Outcome::Collision, false, 7, Duration(900)));
  const auto& s = m.by_arch.at(Architecture::Savvy);
  CHECK(s.runs == 2);
  CHECK(s.fallback_rate() == 0.5);
  CHECK(s.collision_rate() == 0.5);
  CHECK(s.mean_level() == 7.0);
  CHECK(s.mean_latency_ms() == 600.0);
  CHECK_FALSE(ArchMetrics{}.mean_level().has_value());
  CHECK(m.savvy_faults() == 0);
  m.add("a", Architecture::AllOrNothing, verdict(Outcome::SafetyViolationFault, false, {}, {}, 1));
  CHECK(m.savvy_faults() == 0);
  m.add("b", Architecture::Savvy, verdict(Outcome::SafetyViolationFault, false, {}, {}, 2));
  CHECK(m.savvy_faults() == 2);
}

TEST_CASE("zero seeds: empty summary and a clean exit") {
  RunConfig cfg;
  cfg.scenarios = incidents();
  cfg.seed_count = 0;
  const auto r = run_batch(cfg);
  CHECK(r.runs == 0);
  CHECK(r.summary.empty());
  CHECK(r.exit_code() == 0);
}

TEST_CASE("one cell gives a one-row table") {
  MetricsSummary m;
  m.add("I1", Architecture::Savvy, verdict(Outcome::SafeStop, false, 3, Duration(1000)));
  const auto rep = emit_report(m);
  std::istringstream csv(rep.metrics_csv);
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 2);
  CHECK(rep.metrics_csv.rfind("architecture,runs,fallback_rate,collision_rate,faults,mean_level,"
                              "mean_latency_ms\n",
                              0) == 0);
  CHECK(rep.text.find("SafeStop 1/1") != std::string::npos);
}

TEST_CASE("property: merge is commutative and reports are byte-stable") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    MetricsSummary a, b;
    for (int i = 0; i < 20; ++i) {
      auto& m = rng.below(2) ? a : b;
      const auto arch = static_cast<Architecture>(rng.below(3));
      const auto o = static_cast<Outcome>(rng.below(4));
      m.add("S" + std::to_string(rng.below(3)), arch,
            verdict(o, rng.below(2), rng.below(2) ? std::optional<int>(1 + rng.below(7)) : std::nullopt,
                    Duration(static_cast<std::int64_t>(rng.below(5000))), o == Outcome::SafetyViolationFault));
    }
    MetricsSummary ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab == ba);
    const auto r1 = emit_report(ab), r2 = emit_report(ba);
    CHECK(r1.text == r2.text);
    CHECK(r1.metrics_csv == r2.metrics_csv);
    CHECK(r1.verdicts_csv == r2.verdicts_csv);
  }
}

TEST_CASE("I1 under both architectures") {
  RunConfig cfg;
  cfg.scenarios = {incident_fixture("I1")};
  cfg.architectures = {Architecture::Savvy, Architecture::AllOrNothing};
  const auto r = run_batch(cfg);
  CHECK(r.runs == 2);
  CHECK(r.summary.verdicts.at({"I1", Architecture::Savvy}).dominant() == Outcome::SafeStop);
  CHECK(r.summary.verdicts.at({"I1", Architecture::AllOrNothing}).dominant() == Outcome::Collision);
  CHECK(r.exit_code() == 0);
}

TEST_CASE("incident matrix covers every scenario and architecture") {
  RunConfig cfg;
  cfg.scenarios = incidents();
  cfg.architectures = {Architecture::Savvy, Architecture::AllOrNothing};
  cfg.seed_count = 5;
  cfg.jobs = 3;
  const auto r = run_batch(cfg);
  CHECK(r.runs == 70);
  CHECK(r.summary.verdicts.size() == 14);
  CHECK(r.summary.savvy_faults() == 0);
  std::istringstream csv(r.report.verdicts_csv);
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 14);
}

TEST_CASE("jobs do not change the results") {
  RunConfig cfg;
  cfg.scenarios = incidents();
  cfg.architectures = {Architecture::Savvy, Architecture::AllOrNothing, Architecture::SimplexLike};
  cfg.seed_count = 4;
  const auto serial = run_batch(cfg);
  cfg.jobs = 5;
  const auto parallel = run_batch(cfg);
  CHECK(serial.summary == parallel.summary);
  CHECK(serial.report.text == parallel.report.text);
}

TEST_CASE("config errors are raised before anything runs") {
  RunConfig cfg;
  cfg.scenarios = {incident_fixture("I1"), incident_fixture("I1")};
  CHECK_THROWS_AS(run_batch(cfg), DomainError);
  cfg.scenarios = {incident_fixture("I1")};
  cfg.policy = SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, {1, 1}};
  CHECK_THROWS_AS(run_batch(cfg), DomainError);
}

TEST_CASE("output files and I/O error collection") {
  const fs::path dir = fs::temp_directory_path() / "tpqd-batch-test";
  fs::remove_all(dir);
  RunConfig cfg;
  cfg.scenarios = {incident_fixture("I1")};
  cfg.architectures = {Architecture::Savvy};
  cfg.seed_count = 2;
  cfg.out_dir = dir.string();
  const auto r = run_batch(cfg);
  CHECK(r.io_errors.empty());
  const auto trace = trace_path(cfg.out_dir, "I1", Architecture::Savvy, 2);
  CHECK(trace == (dir / "I1" / "savvy" / "seed-2.trace").string());
  CHECK(slurp(trace).rfind("# tpqd-trace v1 scenario=I1 arch=savvy seed=2\n", 0) == 0);
  CHECK(slurp(dir / "report.txt") == r.report.text);
  CHECK(slurp(dir / "summary.csv") == r.report.metrics_csv);
  CHECK(slurp(dir / "verdicts.csv") == r.report.verdicts_csv);

  // A plain file where a directory must go: every write fails, the batch finishes.
  const fs::path blocked = dir / "blocked";
  std::ofstream(blocked) << "x";
  cfg.out_dir = blocked.string();
  const auto bad = run_batch(cfg);
  CHECK(bad.runs == 2);
  CHECK_FALSE(bad.io_errors.empty());
  CHECK(bad.exit_code() == 0);
  fs::remove_all(dir);
}
