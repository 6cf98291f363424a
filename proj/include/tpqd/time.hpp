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

#include <chrono>
#include <cstdint>
#include <limits>

namespace tpqd {

/// Virtual milliseconds. All scheduling arithmetic is integral.
using Duration = std::chrono::duration<std::int64_t, std::milli>;

/// Clock tag for virtual scenario time. Epoch is scenario start.
struct SimClock {
  using rep = std::int64_t;
  using period = std::milli;
  using duration = Duration;
  using time_point = std::chrono::time_point<SimClock, Duration>;
  static constexpr bool is_steady = true;
};

using Timestamp = SimClock::time_point;

inline constexpr Duration kMaxDuration{std::numeric_limits<std::int64_t>::max() / 4};

constexpr std::int64_t to_ms(Duration d) { return d.count(); }
constexpr std::int64_t to_ms(Timestamp t) { return t.time_since_epoch().count(); }
constexpr Timestamp at_ms(std::int64_t ms) { return Timestamp{Duration{ms}}; }

}  // namespace tpqd
