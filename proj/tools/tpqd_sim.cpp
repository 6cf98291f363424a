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

// Command-line front end. Links only the C interface.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpqd/tpqd.h"

namespace {

constexpr int kExitConfig = 2;

struct Closer {
  void operator()(tpqd_scenario* s) const { tpqd_scenario_free(s); }
  void operator()(tpqd_result* r) const { tpqd_result_free(r); }
  void operator()(tpqd_batch* b) const { tpqd_batch_free(b); }
  void operator()(char* s) const { tpqd_string_free(s); }
};
using Scenario = std::unique_ptr<tpqd_scenario, Closer>;
using Batch = std::unique_ptr<tpqd_batch, Closer>;
using Result = std::unique_ptr<tpqd_result, Closer>;
using CString = std::unique_ptr<char, Closer>;

struct Failure {
  std::string message;
};

void check(tpqd_status st, const std::string& context) {
  if (st != TPQD_OK) throw Failure{context + ": " + tpqd_last_error()};
}

/// A file path, an incident id (I1..I7) or a scenario kind name.
Scenario load(const std::string& ref) {
  tpqd_scenario* s = nullptr;
  if (std::filesystem::exists(ref)) {
    check(tpqd_scenario_load(ref.c_str(), &s), "cannot load scenario");
  } else if (tpqd_scenario_incident(ref.c_str(), &s) != TPQD_OK &&
             tpqd_scenario_default(ref.c_str(), &s) != TPQD_OK) {
    throw Failure{"no scenario file, incident id or scenario kind named '" + ref + "'"};
  }
  return Scenario(s);
}

struct SeedRange {
  std::uint64_t first = 1;
  std::uint64_t count = 1;
};

/// "N" or "N..M", inclusive.
SeedRange parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto n = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {n, 1};
    }
    const auto first = std::stoull(text.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(text);
    const auto rest = text.substr(dots + 2);
    const auto last = std::stoull(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    if (last < first) throw Failure{"empty seed range " + text};
    if (last - first == UINT64_MAX) throw Failure{"seed range too large: " + text};
    return {first, last - first + 1};
  } catch (const std::logic_error&) {
    throw Failure{"bad seed range '" + text + "', expected N or N..M"};
  }
}

struct SweepOptions {
  std::string seed;
  std::string seeds;
  std::vector<std::string> archs;
  std::string policy;
  std::string out;
  std::string trace_level = "summary";
  unsigned jobs = 1;
  bool quiet = false;
  bool csv = false;
};

void add_sweep_options(CLI::App* cmd, SweepOptions& o) {
  auto* seed = cmd->add_option("--seed", o.seed, "single seed");
  cmd->add_option("--seeds", o.seeds, "inclusive seed range N..M")->excludes(seed);
  cmd->add_option("--arch", o.archs, "savvy, aon or simplex; repeatable")
      ->check(CLI::IsMember({"savvy", "aon", "all_or_nothing", "simplex", "simplex_like"}));
  cmd->add_option("--policy", o.policy, "static_even or dynamic_weighted:w1,w2,...");
  cmd->add_option("--out", o.out, "output directory (default: $TPQD_OUT_DIR, else none)");
  cmd->add_option("--trace-level", o.trace_level, "none, summary or full")
      ->check(CLI::IsMember({"none", "summary", "full"}));
  cmd->add_option("--jobs,-j", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet,-q", o.quiet, "no report on stdout");
  cmd->add_flag("--csv", o.csv, "print the CSV tables instead of the text report");
}

int sweep(const std::vector<Scenario>& scenarios, const SweepOptions& o,
          const std::vector<std::string>& default_archs) {
  tpqd_batch* raw = nullptr;
  check(tpqd_batch_create(&raw), "batch");
  Batch b(raw);
  for (const auto& s : scenarios) check(tpqd_batch_add_scenario(b.get(), s.get()), "batch");
  SeedRange seeds;
  if (!o.seeds.empty()) seeds = parse_seeds(o.seeds);
  if (!o.seed.empty()) seeds = parse_seeds(o.seed);
  check(tpqd_batch_set_seeds(b.get(), seeds.first, seeds.count), "seeds");
  for (const auto& a : o.archs.empty() ? default_archs : o.archs) {
    check(tpqd_batch_add_architecture(b.get(), a.c_str()), "--arch");
  }
  if (!o.policy.empty()) check(tpqd_batch_set_policy(b.get(), o.policy.c_str()), "--policy");
  std::string out = o.out;
  if (out.empty()) {
    if (const char* env = std::getenv("TPQD_OUT_DIR")) out = env;
  }
  check(tpqd_batch_set_output_dir(b.get(), out.c_str()), "--out");
  check(tpqd_batch_set_trace_level(b.get(), o.trace_level.c_str()), "--trace-level");
  check(tpqd_batch_set_jobs(b.get(), o.jobs), "--jobs");

  const tpqd_status st = tpqd_batch_run(b.get());
  if (st != TPQD_OK && st != TPQD_ERR_IO) check(st, "batch");
  for (std::size_t i = 0; i < tpqd_batch_io_error_count(b.get()); ++i) {
    std::cerr << "tpqd_sim: " << tpqd_batch_io_error(b.get(), i) << '\n';
  }
  if (!o.quiet) {
    if (o.csv) {
      std::cout << tpqd_batch_metrics_csv(b.get()) << '\n' << tpqd_batch_verdicts_csv(b.get());
    } else {
      std::cout << tpqd_batch_report_text(b.get());
    }
  }
  const auto faults = tpqd_batch_savvy_faults(b.get());
  if (faults > 0) std::cerr << "tpqd_sim: " << faults << " safety violation fault(s) under savvy\n";
  return tpqd_batch_exit_code(b.get());
}

std::string emit(const tpqd_scenario* s, bool annotate) {
  char* text = nullptr;
  check(tpqd_scenario_emit(s, annotate ? 1 : 0, &text), "emit");
  return CString(text).get();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic virtual-time simulator of a time-aware safety supervisor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tpqd_version());

  // run
  std::vector<std::string> run_refs;
  SweepOptions run_opts;
  auto* run = app.add_subcommand("run", "Monte-Carlo sweep over scenarios, seeds and architectures");
  run->add_option("scenarios", run_refs, "scenario files, incident ids or scenario kinds")
      ->required();
  add_sweep_options(run, run_opts);

  // incidents
  SweepOptions inc_opts;
  auto* incidents = app.add_subcommand("incidents", "I1..I7 under savvy and all_or_nothing");
  add_sweep_options(incidents, inc_opts);

  // trace
  std::string trace_ref, trace_seed = "1", trace_arch, trace_level = "summary";
  auto* trace = app.add_subcommand("trace", "Single run; trace on stdout, verdict on stderr");
  trace->add_option("scenario", trace_ref, "scenario file, incident id or scenario kind")->required();
  trace->add_option("--seed", trace_seed, "seed");
  trace->add_option("--arch", trace_arch, "override the scenario's architecture");
  trace->add_option("--trace-level", trace_level, "none, summary or full")
      ->check(CLI::IsMember({"none", "summary", "full"}));

  // fixture
  std::string fixture_ref, fixture_dir;
  bool fixture_plain = false;
  auto* fixture = app.add_subcommand("fixture", "Print a scenario file, annotated");
  auto* fixture_arg =
      fixture->add_option("scenario", fixture_ref, "incident id, scenario kind or file");
  fixture->add_option("--write-all", fixture_dir, "write I1..I7 as <dir>/<id>.scn")
      ->excludes(fixture_arg);
  fixture->add_flag("--plain", fixture_plain, "omit the comments");

  // validate
  std::vector<std::string> validate_files;
  auto* validate = app.add_subcommand("validate", "Parse scenario files and list every error");
  validate->add_option("files", validate_files)->required()->check(CLI::ExistingFile);

  // check
  std::vector<int> criteria;
  std::string work_dir;
  auto* checks = app.add_subcommand("check", "Run acceptance criteria (all by default)");
  checks->add_option("criteria", criteria, "criterion numbers")
      ->check(CLI::Range(1, tpqd_criterion_count()));
  checks->add_option("--work-dir", work_dir, "keep the determinism batch outputs here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<Scenario> scenarios;
      for (const auto& r : run_refs) scenarios.push_back(load(r));
      return sweep(scenarios, run_opts, {});
    }
    if (*incidents) {
      std::vector<Scenario> scenarios;
      for (const char* id : {"I1", "I2", "I3", "I4", "I5", "I6", "I7"}) scenarios.push_back(load(id));
      return sweep(scenarios, inc_opts, {"savvy", "aon"});
    }
    if (*trace) {
      Scenario s = load(trace_ref);
      if (!trace_arch.empty()) {
        check(tpqd_scenario_set_architecture(s.get(), trace_arch.c_str()), "--arch");
      }
      const SeedRange seed = parse_seeds(trace_seed);
      if (seed.count != 1) throw Failure{"trace takes a single seed"};
      tpqd_result* raw = nullptr;
      check(tpqd_run(s.get(), seed.first, trace_level.c_str(), &raw), "run");
      Result r(raw);
      std::cout << tpqd_result_trace(r.get());
      tpqd_verdict v{};
      check(tpqd_result_verdict(r.get(), &v), "verdict");
      std::cerr << tpqd_outcome_name(v.outcome) << " margin=" << v.margin << " faults=" << v.faults
                << '\n';
      return v.faults > 0 ? 1 : 0;
    }
    if (*fixture) {
      if (!fixture_dir.empty()) {
        std::filesystem::create_directories(fixture_dir);
        for (const char* id : {"I1", "I2", "I3", "I4", "I5", "I6", "I7"}) {
          const auto path = std::filesystem::path(fixture_dir) / (std::string(id) + ".scn");
          std::ofstream f(path, std::ios::binary | std::ios::trunc);
          f << emit(load(id).get(), !fixture_plain);
          if (!f) throw Failure{"cannot write " + path.string()};
          std::cout << path.string() << '\n';
        }
        return 0;
      }
      if (fixture_ref.empty()) throw Failure{"fixture needs a scenario or --write-all"};
      std::cout << emit(load(fixture_ref).get(), !fixture_plain);
      return 0;
    }
    if (*validate) {
      int bad = 0;
      for (const auto& f : validate_files) {
        tpqd_scenario* raw = nullptr;
        if (tpqd_scenario_load(f.c_str(), &raw) == TPQD_OK) {
          Scenario s(raw);
          std::cout << f << ": ok (" << tpqd_scenario_name(s.get()) << ")\n";
        } else {
          ++bad;
          std::cout << tpqd_last_error() << '\n';
        }
      }
      return bad ? 1 : 0;
    }
    if (*checks) {
      if (criteria.empty()) {
        for (int i = 1; i <= tpqd_criterion_count(); ++i) criteria.push_back(i);
      }
      int failed = 0;
      for (int id : criteria) {
        int passed = 0;
        char* line = nullptr;
        check(tpqd_check_criterion(id, work_dir.empty() ? nullptr : work_dir.c_str(), &passed,
                                   &line),
              "criterion " + std::to_string(id));
        std::cout << CString(line).get() << std::endl;
        failed += !passed;
      }
      return failed ? 1 : 0;
    }
  } catch (const Failure& f) {
    std::cerr << "tpqd_sim: " << f.message << '\n';
    return kExitConfig;
  }
  return 0;
}
