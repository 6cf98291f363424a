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

/* C interface to the tpqd simulator. Every call returns a tpqd_status;
 * on failure tpqd_last_error() describes it (per thread). Handles are opaque
 * and released with the matching *_free function. */
#ifndef TPQD_TPQD_H
#define TPQD_TPQD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TPQD_BUILDING)
#    define TPQD_API __declspec(dllexport)
#  else
#    define TPQD_API __declspec(dllimport)
#  endif
#else
#  define TPQD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tpqd_status {
  TPQD_OK = 0,
  TPQD_ERR_INVALID_ARGUMENT = 1, /* null handle, bad name, out of range */
  TPQD_ERR_PARSE = 2,            /* scenario text rejected */
  TPQD_ERR_DOMAIN = 3,           /* configuration violates an invariant */
  TPQD_ERR_IO = 4,
  TPQD_ERR_INTERNAL = 5
} tpqd_status;

typedef enum tpqd_outcome {
  TPQD_SAFE_STOP = 0,
  TPQD_SAFE_PASS = 1,
  TPQD_COLLISION = 2,
  TPQD_SAFETY_VIOLATION_FAULT = 3
} tpqd_outcome;

typedef struct tpqd_scenario tpqd_scenario;
typedef struct tpqd_result tpqd_result;
typedef struct tpqd_batch tpqd_batch;

typedef struct tpqd_verdict {
  int outcome;                  /* tpqd_outcome */
  double margin;                /* meters */
  int achieved_level;           /* -1 when the command came from an SMod or guard */
  int64_t decision_latency_ms;  /* -1 when no command was issued */
  int detected;
  int fallback;
  int guard_engaged;
  int faults;
  int collided;
  int64_t ended_at_ms;
} tpqd_verdict;

TPQD_API const char* tpqd_version(void);
/* Message of the last failed call on this thread; "" if none. */
TPQD_API const char* tpqd_last_error(void);
TPQD_API const char* tpqd_outcome_name(int outcome);
/* Releases strings returned through char** out-parameters. */
TPQD_API void tpqd_string_free(char* s);

/* ---- scenarios ---- */
TPQD_API tpqd_status tpqd_scenario_load(const char* path, tpqd_scenario** out);
TPQD_API tpqd_status tpqd_scenario_parse(const char* text, tpqd_scenario** out);
/* id: I1..I7 */
TPQD_API tpqd_status tpqd_scenario_incident(const char* id, tpqd_scenario** out);
/* kind: obstacle_avoidance, intersection_crossing, overtaking, crash_avoidance */
TPQD_API tpqd_status tpqd_scenario_default(const char* kind, tpqd_scenario** out);
/* arch: savvy, all_or_nothing (aon), simplex_like (simplex) */
TPQD_API tpqd_status tpqd_scenario_set_architecture(tpqd_scenario* s, const char* arch);
/* policy: static_even or dynamic_weighted:w1,w2,... */
TPQD_API tpqd_status tpqd_scenario_set_policy(tpqd_scenario* s, const char* policy);
TPQD_API tpqd_status tpqd_scenario_emit(const tpqd_scenario* s, int annotate, char** out);
TPQD_API const char* tpqd_scenario_name(const tpqd_scenario* s);
TPQD_API void tpqd_scenario_free(tpqd_scenario* s);

/* ---- single runs ---- */
/* trace_level: none, summary, full */
TPQD_API tpqd_status tpqd_run(const tpqd_scenario* s, uint64_t seed, const char* trace_level,
                              tpqd_result** out);
TPQD_API tpqd_status tpqd_result_verdict(const tpqd_result* r, tpqd_verdict* out);
/* Serialized trace, owned by the result. */
TPQD_API const char* tpqd_result_trace(const tpqd_result* r);
TPQD_API void tpqd_result_free(tpqd_result* r);

/* ---- batches ---- */
TPQD_API tpqd_status tpqd_batch_create(tpqd_batch** out);
/* Copies the scenario; the caller keeps ownership of s. */
TPQD_API tpqd_status tpqd_batch_add_scenario(tpqd_batch* b, const tpqd_scenario* s);
TPQD_API tpqd_status tpqd_batch_set_seeds(tpqd_batch* b, uint64_t first, uint64_t count);
/* Adds one architecture to sweep. None added: each scenario's own. */
TPQD_API tpqd_status tpqd_batch_add_architecture(tpqd_batch* b, const char* arch);
TPQD_API tpqd_status tpqd_batch_set_policy(tpqd_batch* b, const char* policy);
/* "" disables file output. */
TPQD_API tpqd_status tpqd_batch_set_output_dir(tpqd_batch* b, const char* dir);
TPQD_API tpqd_status tpqd_batch_set_trace_level(tpqd_batch* b, const char* level);
TPQD_API tpqd_status tpqd_batch_set_jobs(tpqd_batch* b, unsigned jobs);
/* Runs the sweep. Results stay readable until the next run or free. */
TPQD_API tpqd_status tpqd_batch_run(tpqd_batch* b);
TPQD_API uint64_t tpqd_batch_runs(const tpqd_batch* b);
TPQD_API uint64_t tpqd_batch_savvy_faults(const tpqd_batch* b);
/* 0, or nonzero iff a savvy run raised a guard fault. */
TPQD_API int tpqd_batch_exit_code(const tpqd_batch* b);
TPQD_API const char* tpqd_batch_report_text(const tpqd_batch* b);
TPQD_API const char* tpqd_batch_metrics_csv(const tpqd_batch* b);
TPQD_API const char* tpqd_batch_verdicts_csv(const tpqd_batch* b);
TPQD_API size_t tpqd_batch_io_error_count(const tpqd_batch* b);
TPQD_API const char* tpqd_batch_io_error(const tpqd_batch* b, size_t index);
TPQD_API void tpqd_batch_free(tpqd_batch* b);

/* ---- acceptance criteria ---- */
TPQD_API int tpqd_criterion_count(void);
/* Runs criterion id (1..count). *line gets "criterion N PASS|FAIL name: ...". */
TPQD_API tpqd_status tpqd_check_criterion(int id, const char* work_dir, int* passed, char** line);

#ifdef __cplusplus
}
#endif

#endif /* TPQD_TPQD_H */
