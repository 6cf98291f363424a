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

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpqd/time.hpp"

namespace tpqd {

enum class TraceLevel : std::uint8_t {
  None,     // nothing recorded
  Summary,  // everything except periodic world ticks
  Full,
};

std::string_view to_string(TraceLevel level);
std::optional<TraceLevel> parse_trace_level(std::string_view text);

struct TraceRecord {
  Timestamp at{};
  std::uint64_t seq = 0;
  std::string source;  // bus, scc, tsim.<id>, world, sim
  std::string kind;    // deliver, timer, transition, command, world, ...
  std::vector<std::pair<std::string, std::string>> fields;

  /// One line, fixed field order: "<ms> <seq> <source> <kind> k=v ...".
  std::string line() const;
  const std::string* field(std::string_view key) const;
};

/// Append-only, time-ordered record of a single run.
class Trace {
 public:
  using Fields = std::initializer_list<std::pair<std::string_view, std::string>>;

  explicit Trace(TraceLevel level = TraceLevel::Summary) : level_(level) {}

  TraceLevel level() const { return level_; }
  bool enabled(TraceLevel at_least) const {
    return level_ != TraceLevel::None && level_ >= at_least;
  }

  /// Records are kept in (timestamp, sequence) order; a timestamp earlier than
  /// the last record is a logic error.
  void record(Timestamp at, std::string_view source, std::string_view kind, Fields fields,
              TraceLevel min_level = TraceLevel::Summary);

  void record_fields(Timestamp at, std::string_view source, std::string_view kind,
                     std::vector<std::pair<std::string, std::string>> fields,
                     TraceLevel min_level = TraceLevel::Summary);

  const std::vector<TraceRecord>& records() const { return records_; }

  /// Header lines ("# ...") followed by one line per record.
  std::string serialize(std::string_view header) const;

 private:
  TraceLevel level_;
  std::uint64_t next_seq_ = 0;
  std::vector<TraceRecord> records_;
};

}  // namespace tpqd
