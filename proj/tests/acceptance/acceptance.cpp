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

// Runs every acceptance criterion through the C API and prints one line each.
#include <cstdio>
#include <cstdlib>

#include "tpqd/tpqd.h"

int main(int argc, char** argv) {
  const char* work_dir = argc > 1 ? argv[1] : nullptr;
  int failures = 0;
  for (int id = 1; id <= tpqd_criterion_count(); ++id) {
    int passed = 0;
    char* line = nullptr;
    if (tpqd_check_criterion(id, work_dir, &passed, &line) != TPQD_OK) {
      std::printf("criterion %d FAIL error: %s\n", id, tpqd_last_error());
      ++failures;
      continue;
    }
    std::printf("%s\n", line);
    std::fflush(stdout);
    tpqd_string_free(line);
    if (!passed) ++failures;
  }
  std::printf("%d/%d criteria passed\n", tpqd_criterion_count() - failures, tpqd_criterion_count());
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
