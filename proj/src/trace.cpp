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

#include "tpqd/trace.hpp"

#include <stdexcept>

namespace tpqd {

std::string_view to_string(TraceLevel level) {
  switch (level) {
    case TraceLevel::None: return "none";
    case TraceLevel::Summary: return "summary";
    case TraceLevel::Full: return "full";
  }
  return "?";
}

std::optional<TraceLevel> parse_trace_level(std::string_view text) {
  for (auto l : {TraceLevel::None, TraceLevel::Summary, TraceLevel::Full}) {
    if (text == to_string(l)) return l;
  }
  return std::nullopt;
}

std::string TraceRecord::line() const {
  std::string out = std::to_string(to_ms(at));
  out += ' ';
  out += std::to_string(seq);
  out += ' ';
  out += source;
  out += ' ';
  out += kind;
  for (const auto& [k, v] : fields) {
    out += ' ';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

const std::string* TraceRecord::field(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Trace::record(Timestamp at, std::string_view source, std::string_view kind, Fields fields,
                   TraceLevel min_level) {
  if (!enabled(min_level)) return;
  std::vector<std::pair<std::string, std::string>> owned;
  owned.reserve(fields.size());
  for (const auto& [k, v] : fields) owned.emplace_back(std::string(k), v);
  record_fields(at, source, kind, std::move(owned), min_level);
}

void Trace::record_fields(Timestamp at, std::string_view source, std::string_view kind,
                          std::vector<std::pair<std::string, std::string>> fields,
                          TraceLevel min_level) {
  if (!enabled(min_level)) return;
  if (!records_.empty() && at < records_.back().at) {
    throw std::logic_error("trace record out of time order");
  }
  records_.push_back(
      TraceRecord{at, next_seq_++, std::string(source), std::string(kind), std::move(fields)});
}

std::string Trace::serialize(std::string_view header) const {
  std::string out;
  if (!header.empty()) {
    out += header;
    if (header.back() != '\n') out += '\n';
  }
  for (const auto& rec : records_) {
    out += rec.line();
    out += '\n';
  }
  return out;
}

}  // namespace tpqd
