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

#include "tpqd/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "tpqd/batch.hpp"
#include "tpqd/simulation.hpp"
#include "tpqd/tsim.hpp"

namespace tpqd {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSeed = 20240601;

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

/// Each level is the previous one shifted right and stretched, so every
/// quantile is non-decreasing in level.
AnytimeProfile random_profile(Rng& rng, ScenarioKind kind, int levels) {
  AnytimeProfile p;
  p.scenario = kind;
  double lo = uniform(rng, 1.0, 60.0);
  double mode = lo + uniform(rng, 0.0, 60.0);
  double hi = mode + uniform(rng, 1.0, 120.0);
  for (int l = 0; l < levels; ++l) {
    if (l > 0) {
      const double shift = uniform(rng, 0.0, 150.0);
      const double stretch = uniform(rng, 1.0, 1.6);
      const double nlo = lo + shift;
      mode = nlo + (mode - lo) * stretch;
      hi = nlo + (hi - lo) * stretch;
      lo = nlo;
    }
    p.levels.push_back({LatencyModel::triangular(lo, mode, hi), uniform(rng, 0.5, 1.0)});
  }
  return p;
}

// ---- 1: safety invariant ----------------------------------------------------

ScenarioSpec random_spec(Rng& rng) {
  constexpr ScenarioKind kinds[] = {ScenarioKind::ObstacleAvoidance,
                                    ScenarioKind::IntersectionCrossing, ScenarioKind::Overtaking,
                                    ScenarioKind::CrashAvoidance};
  constexpr CooperativeSensing coop[] = {CooperativeSensing::None, CooperativeSensing::RsuShort,
                                         CooperativeSensing::RsuLong, CooperativeSensing::Active};
  const ScenarioKind kind = kinds[rng.below(4)];
  ScenarioSpec s = default_scenario(kind);
  s.architecture = Architecture::Savvy;
  s.vehicle.speed = uniform(rng, 5.0, 35.0);
  s.vehicle.max_decel = uniform(rng, 3.0, 8.0);
  ObjectSpec o;
  o.distance = uniform(rng, 10.0, 250.0);
  if (kind == ScenarioKind::ObstacleAvoidance) {
    o.truth = kLeafClasses[rng.below(std::size(kLeafClasses))];
    o.speed = rng.below(4) == 0 ? uniform(rng, 0.0, 5.0) : 0.0;
  } else {
    o.truth = ObjectClass::Vehicle;
    o.adjacent = kind == ScenarioKind::Overtaking;
    o.speed = kind == ScenarioKind::Overtaking ? -uniform(rng, 0.0, 20.0) : uniform(rng, 0.0, 8.0);
    s.detection.cooperative = coop[rng.below(4)];
  }
  s.object = o;
  s.detection.distance = uniform(rng, 5.0, o.distance);

  auto& c = s.constants;
  c.control.safety_margin_s = uniform(rng, 0.0, 1.0);
  c.control.smod_wcet = Duration(10 + static_cast<std::int64_t>(rng.below(491)));
  c.control.refine = rng.below(2) == 0;
  c.planning_quantile = uniform(rng, 0.5, 0.99);
  c.guard = rng.below(2) == 0;
  c.slow_factor = uniform(rng, 0.0, 1.0);

  const auto stages = 1 + rng.below(4);
  s.tsims.clear();
  const auto defaults = default_tsims(kind, c.control.smod_wcet);
  for (std::uint64_t i = 0; i < stages; ++i) {
    Tsim t = defaults[std::min<std::size_t>(i, defaults.size() - 1)];
    t.id = "stage" + std::to_string(i);
    t.profile = random_profile(rng, kind, ladder_size(kind));
    t.smod.wcet = Duration(1 + static_cast<std::int64_t>(rng.below(
                                   static_cast<std::uint64_t>(c.control.smod_wcet.count()))));
    s.tsims.push_back(std::move(t));
  }
  if (rng.below(2) == 0) {
    s.policy = SchedulingPolicy{SchedulingPolicy::Kind::StaticEven, {}};
  } else {
    std::vector<double> w;
    for (std::uint64_t i = 0; i < stages; ++i) w.push_back(uniform(rng, 0.2, 5.0));
    s.policy = SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, w};
  }
  return s;
}

CriterionResult safety_invariant() {
  CriterionResult r{1, "safety invariant", false, {}};
  constexpr int kRuns = 10000;
  Rng rng(Rng::derive(kSeed, 1));
  std::uint64_t faults = 0, late = 0, commands = 0, detected = 0;
  for (int i = 0; i < kRuns; ++i) {
    const ScenarioSpec spec = random_spec(rng);
    const RunResult run = run_scenario(spec, rng.below(1ull << 62), TraceLevel::None);
    faults += static_cast<std::uint64_t>(run.verdict.faults);
    if (run.verdict.outcome == Outcome::SafetyViolationFault) ++faults;
    if (!run.process) continue;
    ++detected;
    const Timestamp limit = run.process->bounds().tth_at();
    for (const auto& cmd : run.commands) {
      ++commands;
      if (cmd.issued_at > limit) ++late;
    }
  }
  r.passed = faults == 0 && late == 0 && detected > kRuns / 2;
  r.detail = std::to_string(kRuns) + " runs (" + std::to_string(detected) + " with a task), " +
             std::to_string(commands) + " commands, faults=" + std::to_string(faults) +
             " (need 0), commands after tth=" + std::to_string(late) + " (need 0)";
  return r;
}

// ---- 2: I1 reconstruction ---------------------------------------------------

/// Closed-form stop: constant speed until onset, then constant deceleration.
/// Returns the final gap, negative when the stop point is past the object.
double stop_margin(double distance, double speed, double decel, double onset_s) {
  return distance - speed * onset_s - speed * speed / (2.0 * decel);
}

/// Delivery time of a stage result in a trace, if any.
std::optional<std::int64_t> stage_delivery(const RunResult& run, const std::string& task) {
  for (const auto& rec : run.trace.records()) {
    if (rec.kind != "deliver") continue;
    const auto* payload = rec.field("payload");
    if (payload && payload->find("task=" + task + ",") != std::string::npos) {
      return to_ms(rec.at);
    }
  }
  return std::nullopt;
}

CriterionResult i1_reconstruction() {
  CriterionResult r{2, "I1 reconstruction", false, {}};
  ScenarioSpec spec = incident_fixture("I1");
  const double d = spec.object->distance;
  const double v = spec.vehicle.speed;
  const double a = spec.vehicle.max_decel;
  const double to_impact = d / v;
  const double braking_time = v / a;

  spec.architecture = Architecture::AllOrNothing;
  const RunResult aon = run_scenario(spec, kSeed);
  spec.architecture = Architecture::Savvy;
  const RunResult savvy = run_scenario(spec, kSeed);

  const auto det = detection_time(spec);
  const auto decision = stage_delivery(aon, "2");  // plan result of the baseline
  const bool numbers = det == Duration::zero() && std::abs(to_impact - 6.0) < 1e-12 &&
                       std::abs(braking_time - 2.0) < 1e-12 && decision == 4700;

  auto check = [&](const RunResult& run, Outcome expect, std::string& out) {
    if (run.commands.empty() || run.verdict.outcome != expect) {
      out = "outcome " + std::string(to_string(run.verdict.outcome));
      return false;
    }
    const double onset = static_cast<double>(to_ms(run.commands.front().issued_at)) / 1000.0;
    const double oracle = stop_margin(d, v, a, onset);
    out = std::string(to_string(run.verdict.outcome)) + " brake at " +
          std::to_string(to_ms(run.commands.front().issued_at)) + " ms, margin " +
          num(run.verdict.margin, 3) + " m (oracle " + num(oracle, 3) + ")";
    return std::abs(run.verdict.margin - oracle) < 1e-9;
  };
  std::string a_text, s_text;
  const bool a_ok = check(aon, Outcome::Collision, a_text);
  const bool s_ok = check(savvy, Outcome::SafeStop, s_text) && savvy.verdict.margin > 0.0;
  r.passed = numbers && a_ok && s_ok;
  r.detail = "impact at " + num(to_impact, 1) + " s, braking " + num(braking_time, 1) +
             " s, baseline decision at " + (decision ? std::to_string(*decision) : "none") +
             " ms; all_or_nothing: " + a_text + "; savvy: " + s_text;
  return r;
}

// ---- 3: dominance -----------------------------------------------------------

/// Default obstacle profiles. Weights 4:2:1 over tte 1400 ms give budgets of
/// 800/400/200 ms, each strictly between the stage's L1 and L7 q95 estimates.
ScenarioSpec dominance_spec() {
  ScenarioSpec s = default_scenario(ScenarioKind::ObstacleAvoidance);
  s.name = "dominance";
  s.vehicle.speed = 10.0;
  s.object->distance = 42.0;
  s.detection.distance = 42.0;
  s.policy = SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, {4.0, 2.0, 1.0}};
  return s;
}

CriterionResult dominance() {
  CriterionResult r{3, "paired-seed dominance", false, {}};
  const ScenarioSpec spec = dominance_spec();
  const auto budgets = allocate_budgets(Duration(1400), 3, spec.policy);
  bool between = true;
  for (std::size_t i = 0; i < 3; ++i) {
    TedEstimator ted(spec.tsims[i].profile, spec.constants.planning_quantile);
    between = between && ted.estimate(1) < budgets[i] && budgets[i] < ted.estimate(ted.top_level());
  }

  constexpr int kPairs = 1000;
  int savvy_fb = 0, aon_fb = 0, savvy_col = 0, aon_col = 0;
  bool bounds_ok = true;
  for (int i = 0; i < kPairs; ++i) {
    const auto seed = Rng::derive(kSeed, 3000 + static_cast<std::uint64_t>(i));
    ScenarioSpec s = spec;
    s.architecture = Architecture::Savvy;
    const RunResult sv = run_scenario(s, seed, TraceLevel::None);
    const RunResult aon = run_baseline_all_or_nothing(spec, seed, TraceLevel::None);
    bounds_ok = bounds_ok && sv.process && sv.process->bounds().tte() == Duration(1400);
    savvy_fb += sv.verdict.fallback;
    aon_fb += aon.verdict.fallback;
    savvy_col += sv.verdict.collided;
    aon_col += aon.verdict.collided;
  }
  const double n = kPairs;
  const double ps = savvy_fb / n, pa = aon_fb / n;
  const double pooled = (savvy_fb + aon_fb) / (2.0 * n);
  const double sigma = std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
  const double z = sigma > 0.0 ? (pa - ps) / sigma : (pa > ps ? INFINITY : 0.0);
  r.passed = between && bounds_ok && z > 3.0 && savvy_col <= aon_col;
  r.detail = std::to_string(kPairs) + " pairs, budgets 800/400/200 between L1/L7 q95=" +
             (between ? "yes" : "no") + "; fallback savvy " + num(ps) + " vs all_or_nothing " +
             num(pa) + " (z=" + num(z, 2) + ", need > 3); collisions " +
             std::to_string(savvy_col) + " vs " + std::to_string(aon_col);
  return r;
}

// ---- 4: tune ----------------------------------------------------------------

std::optional<int> tune_oracle(const std::vector<Duration>& estimates, Duration budget) {
  std::optional<int> best;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (estimates[i] <= budget) best = static_cast<int>(i) + 1;
  }
  return best;
}

CriterionResult tune_correctness() {
  CriterionResult r{4, "tune correctness", false, {}};
  Rng rng(Rng::derive(kSeed, 4));
  constexpr int kProfiles = 1000;
  std::uint64_t probes = 0, mismatches = 0, non_monotone = 0;
  for (int i = 0; i < kProfiles; ++i) {
    const int levels = 1 + static_cast<int>(rng.below(10));
    const AnytimeProfile p = random_profile(rng, ScenarioKind::ObstacleAvoidance, levels);
    const TedEstimator ted(p, uniform(rng, 0.5, 0.99));
    std::vector<Duration> estimates;
    for (int l = 1; l <= levels; ++l) estimates.push_back(ted.estimate(l));

    std::vector<Duration> budgets{Duration::zero()};
    for (auto e : estimates) {
      budgets.push_back(e - Duration(1));
      budgets.push_back(e);
      budgets.push_back(e + Duration(1));
    }
    for (int k = 0; k < 20; ++k) {
      budgets.push_back(Duration(static_cast<std::int64_t>(
          rng.below(static_cast<std::uint64_t>(estimates.back().count()) * 2 + 2))));
    }
    std::sort(budgets.begin(), budgets.end());
    int previous = 0;
    for (auto b : budgets) {
      ++probes;
      const auto got = tune(ted, b);
      const int now = got ? got->level : 0;
      if (now != tune_oracle(estimates, b).value_or(0)) ++mismatches;
      if (now < previous) ++non_monotone;
      previous = now;
    }
  }
  r.passed = mismatches == 0 && non_monotone == 0;
  r.detail = std::to_string(kProfiles) + " profiles, " + std::to_string(probes) +
             " budgets; mismatches vs linear scan=" + std::to_string(mismatches) +
             ", monotonicity breaks=" + std::to_string(non_monotone);
  return r;
}

// ---- 5: TED calibration -----------------------------------------------------

CriterionResult ted_calibration() {
  CriterionResult r{5, "TED calibration", false, {}};
  constexpr int kTasks = 10000;
  const double limit = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / kTasks);
  const Tsim tsim = default_tsims(ScenarioKind::ObstacleAvoidance).front();
  const TedEstimator ted(tsim.profile, 0.95);
  const Observation input = truth_observation(ScenarioKind::ObstacleAvoidance, ObjectClass::Human,
                                              CooperativeSensing::None);
  double worst = 0.0;
  int worst_level = 0;
  bool tuned_ok = true;
  for (int level = 1; level <= ted.top_level(); ++level) {
    const Duration budget = ted.estimate(level);
    const auto cfg = tune(ted, budget);
    tuned_ok = tuned_ok && cfg && cfg->level == level;
    int timeouts = 0;
    for (int i = 0; i < kTasks; ++i) {
      EventBus bus;
      TsimTask task(static_cast<std::uint64_t>(i) + 1, 1, 0, budget, bus.now() + budget);
      Rng rng(Rng::derive(Rng::derive(kSeed, 5), static_cast<std::uint64_t>(level * kTasks + i)));
      const auto out = execute_task(tsim, ted, task, 1, input, bus, rng);
      if (out.kind != TaskOutcome::Kind::Delivering) ++timeouts;
    }
    const double rate = static_cast<double>(timeouts) / kTasks;
    if (rate >= worst) {
      worst = rate;
      worst_level = level;
    }
  }
  r.passed = tuned_ok && worst <= limit;
  r.detail = std::to_string(kTasks) + " tasks per level, q=0.95; worst timeout rate " +
             num(worst) + " at L" + std::to_string(worst_level) + " (limit " + num(limit) + ")";
  return r;
}

// ---- 6: allocation ----------------------------------------------------------

std::vector<std::int64_t> allocation_oracle(std::int64_t tte, const std::vector<std::int64_t>& w) {
  std::vector<std::int64_t> out;
  std::int64_t total = 0, used = 0;
  for (auto x : w) total += x;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    out.push_back(w.empty() || total == 0 ? tte / static_cast<std::int64_t>(w.size())
                                          : tte * w[i] / total);
    used += out.back();
  }
  out.push_back(tte - used);
  return out;
}

CriterionResult allocation() {
  CriterionResult r{6, "allocation oracle", false, {}};
  Rng rng(Rng::derive(kSeed, 6));
  constexpr int kTriples = 1000;
  int mismatches = 0, bad_sums = 0;
  for (int i = 0; i < kTriples; ++i) {
    const auto tte = static_cast<std::int64_t>(rng.below(100001));
    const auto n = 1 + rng.below(8);
    // Static even is the equal-weight case of the proportional oracle.
    std::vector<std::int64_t> ones(n, 1), w;
    std::vector<double> wd;
    for (std::uint64_t k = 0; k < n; ++k) {
      w.push_back(1 + static_cast<std::int64_t>(rng.below(20)));
      wd.push_back(static_cast<double>(w.back()));
    }
    for (const auto& [policy, weights] :
         {std::pair{SchedulingPolicy{SchedulingPolicy::Kind::StaticEven, {}}, ones},
          std::pair{SchedulingPolicy{SchedulingPolicy::Kind::DynamicWeighted, wd}, w}}) {
      const auto got = allocate_budgets(Duration(tte), n, policy);
      const auto expect = allocation_oracle(tte, weights);
      std::int64_t sum = 0;
      bool same = got.size() == expect.size();
      for (std::size_t k = 0; same && k < got.size(); ++k) {
        same = got[k].count() == expect[k];
        sum += got[k].count();
      }
      if (!same) ++mismatches;
      if (same && sum != tte) ++bad_sums;
    }
  }
  r.passed = mismatches == 0 && bad_sums == 0;
  r.detail = std::to_string(kTriples) + " (tte, n, weights) triples x 2 policies; mismatches=" +
             std::to_string(mismatches) + ", sums != tte=" + std::to_string(bad_sums);
  return r;
}

// ---- 7: accuracy contrast ---------------------------------------------------

CriterionResult accuracy_contrast() {
  CriterionResult r{7, "accuracy contrast", false, {}};
  // An animal seen through the ladder: L4 is the first rung that asserts an
  // obstruction (L1 has a single possible output and is always right), L7
  // names the leaf.
  constexpr int kShallow = 4;
  AnytimeProfile p = default_profile(ScenarioKind::ObstacleAvoidance, 0);
  const int top = p.top_level();
  p.levels[kShallow - 1].accuracy = 0.95;
  p.levels.back().accuracy = 0.60;
  constexpr int kDraws = 10000;
  std::string text;
  bool ok = true;
  for (const auto& [level, target] : {std::pair{kShallow, 0.95}, std::pair{top, 0.60}}) {
    Rng rng(Rng::derive(kSeed, 70 + static_cast<std::uint64_t>(level)));
    int correct = 0;
    for (int i = 0; i < kDraws; ++i) {
      correct += infer(p, ModelConfig{level, 0}, ObjectClass::Animal, rng).correct;
    }
    const double rate = static_cast<double>(correct) / kDraws;
    ok = ok && std::abs(rate - target) <= 0.01;
    if (!text.empty()) text += ", ";
    text += "L" + std::to_string(level) + " " + num(rate) + " (target " + num(target, 2) +
            " +/- 0.01)";
  }
  r.passed = ok;
  r.detail = std::to_string(kDraws) + " draws per level: " + text;
  return r;
}

// ---- 8: determinism ---------------------------------------------------------

std::uint64_t fnv1a(std::uint64_t h, std::string_view data) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash over the relative paths and contents of every file under `dir`.
std::pair<std::uint64_t, std::size_t> hash_tree(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : files) {
    h = fnv1a(h, fs::relative(f, dir).generic_string());
    std::ifstream in(f, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    h = fnv1a(h, buf.str());
  }
  return {h, files.size()};
}

CriterionResult determinism(const std::string& work_dir) {
  CriterionResult r{8, "determinism", false, {}};
  const fs::path root =
      work_dir.empty()
          ? fs::temp_directory_path() / ("tpqd-determinism-" + std::to_string(::getpid()))
          : fs::path(work_dir);
  fs::remove_all(root);

  RunConfig cfg;
  for (const auto& id : kIncidentIds) cfg.scenarios.push_back(incident_fixture(id));
  cfg.first_seed = 1;
  cfg.seed_count = 20;
  cfg.architectures = {Architecture::Savvy, Architecture::AllOrNothing, Architecture::SimplexLike};
  cfg.trace_level = TraceLevel::Full;

  std::vector<std::pair<std::uint64_t, std::size_t>> hashes;
  std::size_t io_errors = 0;
  for (unsigned jobs : {1u, 4u}) {
    cfg.jobs = jobs;
    cfg.out_dir = (root / ("jobs" + std::to_string(jobs))).string();
    const BatchResult res = run_batch(cfg);
    io_errors += res.io_errors.size();
    hashes.push_back(hash_tree(cfg.out_dir));
  }
  cfg.jobs = 1;
  cfg.out_dir = (root / "repeat").string();
  io_errors += run_batch(cfg).io_errors.size();
  hashes.push_back(hash_tree(cfg.out_dir));
  if (work_dir.empty()) fs::remove_all(root);

  const std::size_t expected_files = std::size(kIncidentIds) * 3 * 20 + 3;
  const bool same = hashes[0] == hashes[1] && hashes[0] == hashes[2];
  r.passed = same && io_errors == 0 && hashes[0].second == expected_files;
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hashes[0].first));
  r.detail = "3 batches of " + std::to_string(hashes[0].second) + " files (jobs 1, 4, 1): " +
             (same ? "identical" : "DIFFERENT") + " hash " + hex +
             ", io errors=" + std::to_string(io_errors);
  return r;
}

}  // namespace

std::string CriterionResult::line() const {
  return "criterion " + std::to_string(id) + " " + (passed ? "PASS" : "FAIL") + " " + name + ": " +
         detail;
}

CriterionResult check_criterion(int id, const std::string& work_dir) {
  switch (id) {
    case 1: return safety_invariant();
    case 2: return i1_reconstruction();
    case 3: return dominance();
    case 4: return tune_correctness();
    case 5: return ted_calibration();
    case 6: return allocation();
    case 7: return accuracy_contrast();
    case 8: return determinism(work_dir);
  }
  throw DomainError("unknown acceptance criterion " + std::to_string(id));
}

std::vector<CriterionResult> check_all(const std::string& work_dir) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(check_criterion(id, work_dir));
  return out;
}

}  // namespace tpqd
