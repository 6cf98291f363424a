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

// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "tpqd/tpqd.h"

namespace {

struct Scenario {
  tpqd_scenario* p = nullptr;
  ~Scenario() { tpqd_scenario_free(p); }
};

struct Result {
  tpqd_result* p = nullptr;
  ~Result() { tpqd_result_free(p); }
};

struct Batch {
  tpqd_batch* p = nullptr;
  ~Batch() { tpqd_batch_free(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  tpqd_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and names") {
  CHECK(std::strlen(tpqd_version()) > 0);
  CHECK(std::string(tpqd_outcome_name(TPQD_COLLISION)) == "Collision");
  CHECK(std::string(tpqd_outcome_name(99)) == "?");
  CHECK(tpqd_criterion_count() == 8);
}

TEST_CASE("null and bad arguments are rejected with a message") {
  CHECK(tpqd_scenario_incident(nullptr, nullptr) == TPQD_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(tpqd_last_error()) > 0);
  Scenario s;
  CHECK(tpqd_scenario_incident("I9", &s.p) == TPQD_ERR_INVALID_ARGUMENT);
  CHECK(s.p == nullptr);
  CHECK(tpqd_scenario_default("hovercraft", &s.p) == TPQD_ERR_INVALID_ARGUMENT);
  REQUIRE(tpqd_scenario_incident("I1", &s.p) == TPQD_OK);
  CHECK(tpqd_scenario_set_architecture(s.p, "quantum") == TPQD_ERR_INVALID_ARGUMENT);
  CHECK(tpqd_scenario_set_policy(s.p, "dynamic_weighted:1,1") == TPQD_ERR_DOMAIN);
  CHECK(tpqd_scenario_set_policy(s.p, "dynamic_weighted:2,1,1") == TPQD_OK);
  Result r;
  CHECK(tpqd_run(s.p, 1, "loud", &r.p) == TPQD_ERR_INVALID_ARGUMENT);
  tpqd_scenario_free(nullptr);
  tpqd_result_free(nullptr);
  tpqd_batch_free(nullptr);
}

TEST_CASE("parse errors carry line numbers; missing files are I/O errors") {
  Scenario s;
  CHECK(tpqd_scenario_parse("[scenario]\nname = x\nkind = obstacle_avoidance\n[vehicle]\nspeed = fast\n",
                            &s.p) == TPQD_ERR_PARSE);
  CHECK(std::string(tpqd_last_error()).find("line 5") != std::string::npos);
  CHECK(tpqd_scenario_load("/nonexistent/x.scn", &s.p) == TPQD_ERR_IO);
  REQUIRE(tpqd_scenario_parse("[scenario]\nname = ok\nkind = overtaking\n", &s.p) == TPQD_OK);
  CHECK(std::string(tpqd_scenario_name(s.p)) == "ok");
}

TEST_CASE("single run: I1 under both architectures") {
  Scenario s;
  REQUIRE(tpqd_scenario_incident("I1", &s.p) == TPQD_OK);
  Result savvy;
  REQUIRE(tpqd_run(s.p, 1, "summary", &savvy.p) == TPQD_OK);
  tpqd_verdict v{};
  REQUIRE(tpqd_result_verdict(savvy.p, &v) == TPQD_OK);
  CHECK(v.outcome == TPQD_SAFE_STOP);
  CHECK(v.margin > 0);
  CHECK(v.faults == 0);
  CHECK(v.detected == 1);
  CHECK(std::string(tpqd_result_trace(savvy.p)).rfind("# tpqd-trace v1 scenario=I1 arch=savvy seed=1\n", 0) ==
        0);

  REQUIRE(tpqd_scenario_set_architecture(s.p, "aon") == TPQD_OK);
  Result aon;
  REQUIRE(tpqd_run(s.p, 1, "none", &aon.p) == TPQD_OK);
  REQUIRE(tpqd_result_verdict(aon.p, &v) == TPQD_OK);
  CHECK(v.outcome == TPQD_COLLISION);
  CHECK(v.achieved_level == 7);
  CHECK(v.decision_latency_ms == 5200);
}

TEST_CASE("emit then parse gives the same text") {
  Scenario s, back;
  REQUIRE(tpqd_scenario_incident("I4", &s.p) == TPQD_OK);
  char* text = nullptr;
  REQUIRE(tpqd_scenario_emit(s.p, 1, &text) == TPQD_OK);
  const std::string first = take(text);
  REQUIRE(tpqd_scenario_parse(first.c_str(), &back.p) == TPQD_OK);
  REQUIRE(tpqd_scenario_emit(back.p, 1, &text) == TPQD_OK);
  CHECK(take(text) == first);
}

TEST_CASE("batch lifecycle") {
  Batch b;
  REQUIRE(tpqd_batch_create(&b.p) == TPQD_OK);
  for (const char* id : {"I1", "I7"}) {
    Scenario s;
    REQUIRE(tpqd_scenario_incident(id, &s.p) == TPQD_OK);
    REQUIRE(tpqd_batch_add_scenario(b.p, s.p) == TPQD_OK);
  }
  REQUIRE(tpqd_batch_set_seeds(b.p, 1, 3) == TPQD_OK);
  REQUIRE(tpqd_batch_add_architecture(b.p, "savvy") == TPQD_OK);
  REQUIRE(tpqd_batch_add_architecture(b.p, "aon") == TPQD_OK);
  CHECK(tpqd_batch_add_architecture(b.p, "nope") == TPQD_ERR_INVALID_ARGUMENT);
  REQUIRE(tpqd_batch_set_jobs(b.p, 2) == TPQD_OK);
  REQUIRE(tpqd_batch_set_trace_level(b.p, "none") == TPQD_OK);
  REQUIRE(tpqd_batch_run(b.p) == TPQD_OK);
  CHECK(tpqd_batch_runs(b.p) == 12);
  CHECK(tpqd_batch_savvy_faults(b.p) == 0);
  CHECK(tpqd_batch_exit_code(b.p) == 0);
  CHECK(tpqd_batch_io_error_count(b.p) == 0);
  CHECK(std::string(tpqd_batch_io_error(b.p, 0)).empty());
  CHECK(std::string(tpqd_batch_report_text(b.p)).find("I1") != std::string::npos);
  CHECK(std::string(tpqd_batch_metrics_csv(b.p)).rfind("architecture,", 0) == 0);
  CHECK(std::string(tpqd_batch_verdicts_csv(b.p)).rfind("scenario,", 0) == 0);
}

TEST_CASE("criterion calls validate their id") {
  int passed = -1;
  char* line = nullptr;
  CHECK(tpqd_check_criterion(0, nullptr, &passed, &line) == TPQD_ERR_INVALID_ARGUMENT);
  CHECK(tpqd_check_criterion(9, nullptr, &passed, &line) == TPQD_ERR_INVALID_ARGUMENT);
  REQUIRE(tpqd_check_criterion(6, nullptr, &passed, &line) == TPQD_OK);
  CHECK(passed == 1);
  CHECK(take(line).rfind("criterion 6 PASS", 0) == 0);
}
