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

#include <any>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tpqd/time.hpp"
#include "tpqd/trace.hpp"

namespace tpqd {

enum class Topic : std::uint8_t {
  SensorsPreliminary,
  SensorsDetail,
  TsimResults,
  Actuators,
  SupervisorTimers,
};

std::string_view to_string(Topic topic);

enum class TimerKind : std::uint8_t { TteExpiry, TthGuard, Custom };

std::string_view to_string(TimerKind kind);

using MessageId = std::uint64_t;

struct TimerHandle {
  std::uint64_t id = 0;
  Timestamp fire_at{};
  TimerKind kind = TimerKind::Custom;

  friend bool operator==(const TimerHandle&, const TimerHandle&) = default;
};

/// Payload carried on a topic. `summary` is what the trace sees.
struct Message {
  std::string summary;
  std::any body;
};

struct Delivery {
  Timestamp at{};
  std::uint64_t seq = 0;  // global insertion order
  Topic topic = Topic::SupervisorTimers;
  std::variant<MessageId, TimerHandle> item;
  Message message;  // empty for timers

  bool is_timer() const { return std::holds_alternative<TimerHandle>(item); }
  const TimerHandle& timer() const { return std::get<TimerHandle>(item); }
};

/// Raised when something is scheduled before the current virtual time.
class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Virtual-time pub/sub broker. Items are delivered in (fire_at, insertion)
/// order; handlers run synchronously inside advance_until() and may schedule
/// further items at or after the current time.
class EventBus {
 public:
  using MessageHandler = std::function<void(const Delivery&)>;
  using TimerHandler = std::function<void(const TimerHandle&)>;

  explicit EventBus(Trace* trace = nullptr) : trace_(trace) {}

  EventBus(const EventBus&) = delete;
  EventBus& operator=(const EventBus&) = delete;

  Timestamp now() const { return now_; }
  Trace* trace() const { return trace_; }

  void subscribe(Topic topic, MessageHandler handler);
  void on_timer(TimerHandler handler);

  MessageId publish(Topic topic, Message message, Timestamp at);
  TimerHandle set_timer(Timestamp fire_at, TimerKind kind);

  /// False if the timer was already delivered or cancelled.
  bool cancel(const TimerHandle& timer);
  bool is_pending(const TimerHandle& timer) const;

  /// Delivers every item with fire_at <= t, then sets now = t.
  std::vector<Delivery> advance_until(Timestamp t);

  /// Earliest pending (non-cancelled) fire time.
  std::optional<Timestamp> next_fire_at();

  std::size_t pending() const { return queue_.size() - cancelled_in_queue_; }

 private:
  enum class TimerState : std::uint8_t { Pending, Cancelled, Delivered };

  struct Entry {
    Timestamp fire_at;
    std::uint64_t seq;
    Topic topic;
    std::variant<MessageId, TimerHandle> item;
    Message message;
  };

  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  void check_not_past(Timestamp at, std::string_view what) const;
  bool is_cancelled(const Entry& e) const;
  void drop_cancelled_top();
  void dispatch(const Delivery& d);

  Trace* trace_;
  Timestamp now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_message_id_ = 1;
  std::uint64_t next_timer_id_ = 1;
  std::size_t cancelled_in_queue_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_map<std::uint64_t, TimerState> timers_;
  std::vector<std::pair<Topic, MessageHandler>> subscribers_;
  std::vector<TimerHandler> timer_handlers_;
};

}  // namespace tpqd
