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

#include "tpqd/tpqd.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "tpqd/acceptance.hpp"
#include "tpqd/batch.hpp"
#include "tpqd/scenario_file.hpp"
#include "tpqd/simulation.hpp"

struct tpqd_scenario {
  tpqd::ScenarioSpec spec;
};

struct tpqd_result {
  tpqd::RunResult run;
  std::string trace;
};

struct tpqd_batch {
  tpqd::RunConfig config;
  tpqd::BatchResult result;
};

namespace {

thread_local std::string g_last_error;

tpqd_status fail(tpqd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Maps exceptions escaping the core onto status codes.
template <typename F>
tpqd_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const tpqd::DomainError& e) {
    return fail(TPQD_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TPQD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TPQD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TPQD_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define TPQD_REQUIRE(cond, what) \
  if (!(cond)) return fail(TPQD_ERR_INVALID_ARGUMENT, what)

tpqd_status parsed_scenario(const std::string& text, tpqd_scenario** out) {
  auto parsed = tpqd::parse_scenario_file(text);
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& e : parsed.errors) msg += (msg.empty() ? "" : "\n") + e.str();
    return fail(TPQD_ERR_PARSE, msg);
  }
  *out = new tpqd_scenario{std::move(*parsed.spec)};
  return TPQD_OK;
}

}  // namespace

extern "C" {

const char* tpqd_version(void) { return "1.0.0"; }

const char* tpqd_last_error(void) { return g_last_error.c_str(); }

const char* tpqd_outcome_name(int outcome) {
  if (outcome < 0 || outcome > 3) return "?";
  return tpqd::to_string(static_cast<tpqd::Outcome>(outcome)).data();
}

void tpqd_string_free(char* s) { delete[] s; }

tpqd_status tpqd_scenario_load(const char* path, tpqd_scenario** out) {
  return guarded([&] {
    TPQD_REQUIRE(path && out, "path and out must not be null");
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(TPQD_ERR_IO, std::string("cannot open ") + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const tpqd_status st = parsed_scenario(buf.str(), out);
    if (st == TPQD_ERR_PARSE) g_last_error = std::string(path) + ":\n" + g_last_error;
    return st;
  });
}

tpqd_status tpqd_scenario_parse(const char* text, tpqd_scenario** out) {
  return guarded([&] {
    TPQD_REQUIRE(text && out, "text and out must not be null");
    return parsed_scenario(text, out);
  });
}

tpqd_status tpqd_scenario_incident(const char* id, tpqd_scenario** out) {
  return guarded([&] {
    TPQD_REQUIRE(id && out, "id and out must not be null");
    bool known = false;
    for (auto k : tpqd::kIncidentIds) known = known || k == id;
    TPQD_REQUIRE(known, std::string("unknown incident id: ") + id);
    *out = new tpqd_scenario{tpqd::incident_fixture(id)};
    return TPQD_OK;
  });
}

tpqd_status tpqd_scenario_default(const char* kind, tpqd_scenario** out) {
  return guarded([&] {
    TPQD_REQUIRE(kind && out, "kind and out must not be null");
    const auto k = tpqd::parse_scenario_kind(kind);
    TPQD_REQUIRE(k, std::string("unknown scenario kind: ") + kind);
    *out = new tpqd_scenario{tpqd::default_scenario(*k)};
    return TPQD_OK;
  });
}

tpqd_status tpqd_scenario_set_architecture(tpqd_scenario* s, const char* arch) {
  return guarded([&] {
    TPQD_REQUIRE(s && arch, "scenario and arch must not be null");
    const auto a = tpqd::parse_architecture(arch);
    TPQD_REQUIRE(a, std::string("unknown architecture: ") + arch);
    s->spec.architecture = *a;
    return TPQD_OK;
  });
}

tpqd_status tpqd_scenario_set_policy(tpqd_scenario* s, const char* policy) {
  return guarded([&] {
    TPQD_REQUIRE(s && policy, "scenario and policy must not be null");
    const auto p = tpqd::SchedulingPolicy::parse(policy);
    TPQD_REQUIRE(p, std::string("bad policy: ") + policy);
    tpqd::validate_policy(*p, s->spec.tsims.size());
    s->spec.policy = *p;
    return TPQD_OK;
  });
}

tpqd_status tpqd_scenario_emit(const tpqd_scenario* s, int annotate, char** out) {
  return guarded([&] {
    TPQD_REQUIRE(s && out, "scenario and out must not be null");
    *out = dup_string(tpqd::emit_scenario_file(s->spec, annotate != 0));
    return TPQD_OK;
  });
}

const char* tpqd_scenario_name(const tpqd_scenario* s) { return s ? s->spec.name.c_str() : ""; }

void tpqd_scenario_free(tpqd_scenario* s) { delete s; }

tpqd_status tpqd_run(const tpqd_scenario* s, uint64_t seed, const char* trace_level,
                     tpqd_result** out) {
  return guarded([&] {
    TPQD_REQUIRE(s && out, "scenario and out must not be null");
    auto level = tpqd::TraceLevel::Summary;
    if (trace_level) {
      const auto l = tpqd::parse_trace_level(trace_level);
      TPQD_REQUIRE(l, std::string("unknown trace level: ") + trace_level);
      level = *l;
    }
    auto* r = new tpqd_result{tpqd::run_scenario(s->spec, seed, level), {}};
    r->trace = r->run.serialize();
    *out = r;
    return TPQD_OK;
  });
}

tpqd_status tpqd_result_verdict(const tpqd_result* r, tpqd_verdict* out) {
  return guarded([&] {
    TPQD_REQUIRE(r && out, "result and out must not be null");
    const auto& v = r->run.verdict;
    out->outcome = static_cast<int>(v.outcome);
    out->margin = v.margin;
    out->achieved_level = v.achieved_level.value_or(-1);
    out->decision_latency_ms = v.decision_latency ? v.decision_latency->count() : -1;
    out->detected = v.detected;
    out->fallback = v.fallback;
    out->guard_engaged = v.guard_engaged;
    out->faults = v.faults;
    out->collided = v.collided;
    out->ended_at_ms = tpqd::to_ms(v.ended_at);
    return TPQD_OK;
  });
}

const char* tpqd_result_trace(const tpqd_result* r) { return r ? r->trace.c_str() : ""; }

void tpqd_result_free(tpqd_result* r) { delete r; }

tpqd_status tpqd_batch_create(tpqd_batch** out) {
  return guarded([&] {
    TPQD_REQUIRE(out, "out must not be null");
    *out = new tpqd_batch{};
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_add_scenario(tpqd_batch* b, const tpqd_scenario* s) {
  return guarded([&] {
    TPQD_REQUIRE(b && s, "batch and scenario must not be null");
    b->config.scenarios.push_back(s->spec);
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_set_seeds(tpqd_batch* b, uint64_t first, uint64_t count) {
  return guarded([&] {
    TPQD_REQUIRE(b, "batch must not be null");
    TPQD_REQUIRE(count == 0 || first + (count - 1) >= first, "seed range overflows");
    b->config.first_seed = first;
    b->config.seed_count = count;
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_add_architecture(tpqd_batch* b, const char* arch) {
  return guarded([&] {
    TPQD_REQUIRE(b && arch, "batch and arch must not be null");
    const auto a = tpqd::parse_architecture(arch);
    TPQD_REQUIRE(a, std::string("unknown architecture: ") + arch);
    auto& archs = b->config.architectures;
    if (std::find(archs.begin(), archs.end(), *a) == archs.end()) archs.push_back(*a);
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_set_policy(tpqd_batch* b, const char* policy) {
  return guarded([&] {
    TPQD_REQUIRE(b && policy, "batch and policy must not be null");
    const auto p = tpqd::SchedulingPolicy::parse(policy);
    TPQD_REQUIRE(p, std::string("bad policy: ") + policy);
    b->config.policy = *p;
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_set_output_dir(tpqd_batch* b, const char* dir) {
  return guarded([&] {
    TPQD_REQUIRE(b && dir, "batch and dir must not be null");
    b->config.out_dir = dir;
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_set_trace_level(tpqd_batch* b, const char* level) {
  return guarded([&] {
    TPQD_REQUIRE(b && level, "batch and level must not be null");
    const auto l = tpqd::parse_trace_level(level);
    TPQD_REQUIRE(l, std::string("unknown trace level: ") + level);
    b->config.trace_level = *l;
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_set_jobs(tpqd_batch* b, unsigned jobs) {
  return guarded([&] {
    TPQD_REQUIRE(b && jobs > 0, "jobs must be positive");
    b->config.jobs = jobs;
    return TPQD_OK;
  });
}

tpqd_status tpqd_batch_run(tpqd_batch* b) {
  return guarded([&] {
    TPQD_REQUIRE(b, "batch must not be null");
    b->result = tpqd::BatchResult{};
    b->result = tpqd::run_batch(b->config);
    if (!b->result.io_errors.empty()) {
      return fail(TPQD_ERR_IO, std::to_string(b->result.io_errors.size()) +
                                   " file(s) could not be written; first: " +
                                   b->result.io_errors.front());
    }
    return TPQD_OK;
  });
}

uint64_t tpqd_batch_runs(const tpqd_batch* b) { return b ? b->result.runs : 0; }

uint64_t tpqd_batch_savvy_faults(const tpqd_batch* b) {
  return b ? b->result.summary.savvy_faults() : 0;
}

int tpqd_batch_exit_code(const tpqd_batch* b) { return b ? b->result.exit_code() : 0; }

const char* tpqd_batch_report_text(const tpqd_batch* b) {
  return b ? b->result.report.text.c_str() : "";
}

const char* tpqd_batch_metrics_csv(const tpqd_batch* b) {
  return b ? b->result.report.metrics_csv.c_str() : "";
}

const char* tpqd_batch_verdicts_csv(const tpqd_batch* b) {
  return b ? b->result.report.verdicts_csv.c_str() : "";
}

size_t tpqd_batch_io_error_count(const tpqd_batch* b) {
  return b ? b->result.io_errors.size() : 0;
}

const char* tpqd_batch_io_error(const tpqd_batch* b, size_t index) {
  if (!b || index >= b->result.io_errors.size()) return "";
  return b->result.io_errors[index].c_str();
}

void tpqd_batch_free(tpqd_batch* b) { delete b; }

int tpqd_criterion_count(void) { return tpqd::kCriterionCount; }

tpqd_status tpqd_check_criterion(int id, const char* work_dir, int* passed, char** line) {
  return guarded([&] {
    TPQD_REQUIRE(passed && line, "passed and line must not be null");
    TPQD_REQUIRE(id >= 1 && id <= tpqd::kCriterionCount, "criterion id out of range");
    const auto r = tpqd::check_criterion(id, work_dir ? work_dir : "");
    *passed = r.passed;
    *line = dup_string(r.line());
    return TPQD_OK;
  });
}

}  // extern "C"
