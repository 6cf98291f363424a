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

#include "tpqd/batch.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace tpqd {
namespace {

namespace fs = std::filesystem;

constexpr Outcome kSeverity[] = {Outcome::SafetyViolationFault, Outcome::Collision,
                                 Outcome::SafeStop, Outcome::SafePass};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string opt_fixed(const std::optional<double>& v, int digits) {
  return v ? fixed(*v, digits) : "-";
}

std::string safe_name(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

/// Plain column-aligned table; the first row is the header.
std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += i + 1 < r.size() ? pad(r[i], width[i] + 2) : r[i];
    }
    out += line + '\n';
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + '\n';
}

std::string cell_text(const VerdictCounts& c) {
  const Outcome d = c.dominant();
  return std::string(to_string(d)) + " " + std::to_string(c.count(d)) + "/" +
         std::to_string(c.runs());
}

struct Cell {
  std::size_t scenario;
  Architecture arch;
  std::uint64_t seed;
};

bool write_file(const std::string& path, const std::string& content, std::string& error) {
  std::error_code ec;
  fs::create_directories(fs::path(path).parent_path(), ec);
  if (ec) {
    error = path + ": " + ec.message();
    return false;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    error = path + ": write failed";
    return false;
  }
  return true;
}

}  // namespace

std::uint64_t VerdictCounts::runs() const {
  std::uint64_t n = 0;
  for (auto c : by_outcome) n += c;
  return n;
}

Outcome VerdictCounts::dominant() const {
  Outcome best = kSeverity[0];
  for (Outcome o : kSeverity) {
    if (count(o) > count(best)) best = o;
  }
  return best;
}

double ArchMetrics::fallback_rate() const {
  return runs ? static_cast<double>(fallbacks) / static_cast<double>(runs) : 0.0;
}

double ArchMetrics::collision_rate() const {
  return runs ? static_cast<double>(collisions) / static_cast<double>(runs) : 0.0;
}

std::optional<double> ArchMetrics::mean_level() const {
  if (!level_runs) return std::nullopt;
  return static_cast<double>(level_sum) / static_cast<double>(level_runs);
}

std::optional<double> ArchMetrics::mean_latency_ms() const {
  if (!latency_runs) return std::nullopt;
  return static_cast<double>(latency_sum_ms) / static_cast<double>(latency_runs);
}

void MetricsSummary::add(const std::string& scenario, Architecture arch, const Verdict& v) {
  auto& m = by_arch[arch];
  ++m.runs;
  if (v.fallback) ++m.fallbacks;
  if (v.collided) ++m.collisions;
  m.faults += static_cast<std::uint64_t>(v.faults);
  if (v.achieved_level) {
    m.level_sum += static_cast<std::uint64_t>(*v.achieved_level);
    ++m.level_runs;
  }
  if (v.decision_latency) {
    m.latency_sum_ms += v.decision_latency->count();
    ++m.latency_runs;
  }
  ++verdicts[{scenario, arch}].by_outcome[static_cast<std::size_t>(v.outcome)];
}

void MetricsSummary::merge(const MetricsSummary& other) {
  for (const auto& [arch, o] : other.by_arch) {
    auto& m = by_arch[arch];
    m.runs += o.runs;
    m.fallbacks += o.fallbacks;
    m.collisions += o.collisions;
    m.faults += o.faults;
    m.level_sum += o.level_sum;
    m.level_runs += o.level_runs;
    m.latency_sum_ms += o.latency_sum_ms;
    m.latency_runs += o.latency_runs;
  }
  for (const auto& [key, o] : other.verdicts) {
    auto& c = verdicts[key];
    for (std::size_t i = 0; i < c.by_outcome.size(); ++i) c.by_outcome[i] += o.by_outcome[i];
  }
}

std::uint64_t MetricsSummary::savvy_faults() const {
  const auto it = by_arch.find(Architecture::Savvy);
  return it == by_arch.end() ? 0 : it->second.faults;
}

Report emit_report(const MetricsSummary& summary) {
  Report r;
  const std::vector<std::string> metric_cols{"architecture",   "runs",       "fallback_rate",
                                             "collision_rate", "faults",     "mean_level",
                                             "mean_latency_ms"};
  std::vector<std::vector<std::string>> rows{metric_cols};
  r.metrics_csv = csv_row(metric_cols);
  for (const auto& [arch, m] : summary.by_arch) {
    std::vector<std::string> row{std::string(to_string(arch)), std::to_string(m.runs),
                                 fixed(m.fallback_rate(), 4),  fixed(m.collision_rate(), 4),
                                 std::to_string(m.faults),     opt_fixed(m.mean_level(), 3),
                                 opt_fixed(m.mean_latency_ms(), 1)};
    r.metrics_csv += csv_row(row);
    rows.push_back(std::move(row));
  }

  std::vector<Architecture> archs;
  std::vector<std::string> scenarios;
  {
    std::set<Architecture> a;
    std::set<std::string> s;
    for (const auto& [key, c] : summary.verdicts) {
      s.insert(key.first);
      a.insert(key.second);
    }
    archs.assign(a.begin(), a.end());
    scenarios.assign(s.begin(), s.end());
  }
  std::vector<std::vector<std::string>> matrix{{"scenario"}};
  for (auto a : archs) matrix.front().emplace_back(to_string(a));
  for (const auto& s : scenarios) {
    std::vector<std::string> row{s};
    for (auto a : archs) {
      const auto it = summary.verdicts.find({s, a});
      row.push_back(it == summary.verdicts.end() ? "-" : cell_text(it->second));
    }
    matrix.push_back(std::move(row));
  }

  r.verdicts_csv = csv_row({"scenario", "architecture", "runs", "safe_stop", "safe_pass",
                            "collision", "safety_violation_fault", "dominant"});
  for (const auto& [key, c] : summary.verdicts) {
    r.verdicts_csv += csv_row({key.first, std::string(to_string(key.second)),
                               std::to_string(c.runs()), std::to_string(c.count(Outcome::SafeStop)),
                               std::to_string(c.count(Outcome::SafePass)),
                               std::to_string(c.count(Outcome::Collision)),
                               std::to_string(c.count(Outcome::SafetyViolationFault)),
                               std::string(to_string(c.dominant()))});
  }

  std::ostringstream text;
  text << "architectures\n" << table(rows) << "\nverdicts (dominant outcome, count/runs)\n"
       << table(matrix);
  r.text = text.str();
  return r;
}

std::string trace_path(const std::string& out_dir, const std::string& scenario, Architecture arch,
                       std::uint64_t seed) {
  return (fs::path(out_dir) / safe_name(scenario) / std::string(to_string(arch)) /
          ("seed-" + std::to_string(seed) + ".trace"))
      .string();
}

BatchResult run_batch(const RunConfig& config) {
  std::vector<ScenarioSpec> specs = config.scenarios;
  std::set<std::string> names;
  for (auto& s : specs) {
    if (config.policy) s.policy = *config.policy;
    validate_scenario(s);
    if (!names.insert(safe_name(s.name)).second) {
      throw DomainError("batch: duplicate scenario name " + s.name);
    }
  }
  if (config.seed_count > 0 && config.first_seed + (config.seed_count - 1) < config.first_seed) {
    throw DomainError("batch: seed range overflows");
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::vector<Architecture> archs = config.architectures;
    if (archs.empty()) archs.push_back(specs[i].architecture);
    for (auto a : archs) {
      for (std::uint64_t k = 0; k < config.seed_count; ++k) {
        cells.push_back({i, a, config.first_seed + k});
      }
    }
  }

  const bool write = !config.out_dir.empty();
  std::vector<Verdict> verdicts(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      ScenarioSpec spec = specs[c.scenario];
      spec.architecture = c.arch;
      const auto level = write ? config.trace_level : TraceLevel::None;
      RunResult run = run_scenario(spec, c.seed, level);
      verdicts[i] = run.verdict;
      if (write && config.trace_level != TraceLevel::None) {
        write_file(trace_path(config.out_dir, spec.name, c.arch, c.seed), run.serialize(),
                   errors[i]);
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(
                                                                         std::max<std::size_t>(cells.size(), 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  BatchResult out;
  out.runs = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.summary.add(specs[cells[i].scenario].name, cells[i].arch, verdicts[i]);
    if (!errors[i].empty()) out.io_errors.push_back(errors[i]);
  }
  out.report = emit_report(out.summary);
  if (write) {
    const fs::path dir(config.out_dir);
    for (const auto& [name, content] :
         {std::pair<std::string, const std::string*>{"report.txt", &out.report.text},
          {"summary.csv", &out.report.metrics_csv},
          {"verdicts.csv", &out.report.verdicts_csv}}) {
      std::string err;
      if (!write_file((dir / name).string(), *content, err)) out.io_errors.push_back(err);
    }
  }
  return out;
}

}  // namespace tpqd
