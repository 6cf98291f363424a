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

#include "tpqd/event_bus.hpp"

#include <string>

namespace tpqd {

std::string_view to_string(Topic topic) {
  switch (topic) {
    case Topic::SensorsPreliminary: return "sensors.preliminary";
    case Topic::SensorsDetail: return "sensors.detail";
    case Topic::TsimResults: return "tsim.results";
    case Topic::Actuators: return "actuators";
    case Topic::SupervisorTimers: return "supervisor.timers";
  }
  return "?";
}

std::string_view to_string(TimerKind kind) {
  switch (kind) {
    case TimerKind::TteExpiry: return "tte_expiry";
    case TimerKind::TthGuard: return "tth_guard";
    case TimerKind::Custom: return "custom";
  }
  return "?";
}

void EventBus::subscribe(Topic topic, MessageHandler handler) {
  subscribers_.emplace_back(topic, std::move(handler));
}

void EventBus::on_timer(TimerHandler handler) { timer_handlers_.push_back(std::move(handler)); }

void EventBus::check_not_past(Timestamp at, std::string_view what) const {
  if (at < now_) {
    throw SchedulingError(std::string(what) + " scheduled in the past: at=" +
                          std::to_string(to_ms(at)) + " now=" + std::to_string(to_ms(now_)));
  }
}

MessageId EventBus::publish(Topic topic, Message message, Timestamp at) {
  check_not_past(at, "publish");
  const MessageId id = next_message_id_++;
  queue_.push(Entry{at, next_seq_++, topic, id, std::move(message)});
  return id;
}

TimerHandle EventBus::set_timer(Timestamp fire_at, TimerKind kind) {
  check_not_past(fire_at, "timer");
  TimerHandle handle{next_timer_id_++, fire_at, kind};
  timers_.emplace(handle.id, TimerState::Pending);
  queue_.push(Entry{fire_at, next_seq_++, Topic::SupervisorTimers, handle, {}});
  return handle;
}

bool EventBus::cancel(const TimerHandle& timer) {
  auto it = timers_.find(timer.id);
  if (it == timers_.end() || it->second != TimerState::Pending) return false;
  it->second = TimerState::Cancelled;
  ++cancelled_in_queue_;
  return true;
}

bool EventBus::is_pending(const TimerHandle& timer) const {
  auto it = timers_.find(timer.id);
  return it != timers_.end() && it->second == TimerState::Pending;
}

bool EventBus::is_cancelled(const Entry& e) const {
  const auto* handle = std::get_if<TimerHandle>(&e.item);
  if (!handle) return false;
  auto it = timers_.find(handle->id);
  return it != timers_.end() && it->second == TimerState::Cancelled;
}

void EventBus::drop_cancelled_top() {
  while (!queue_.empty() && is_cancelled(queue_.top())) {
    timers_.erase(std::get<TimerHandle>(queue_.top().item).id);
    queue_.pop();
    --cancelled_in_queue_;
  }
}

std::optional<Timestamp> EventBus::next_fire_at() {
  drop_cancelled_top();
  if (queue_.empty()) return std::nullopt;
  return queue_.top().fire_at;
}

void EventBus::dispatch(const Delivery& d) {
  if (d.is_timer()) {
    const auto& handle = d.timer();
    if (trace_) {
      trace_->record(d.at, "bus", "timer",
                     {{"id", std::to_string(handle.id)}, {"timer", std::string(to_string(handle.kind))}},
                     handle.kind == TimerKind::Custom ? TraceLevel::Full : TraceLevel::Summary);
    }
    for (auto& handler : timer_handlers_) handler(handle);
    return;
  }
  if (trace_) {
    trace_->record(d.at, "bus", "deliver",
                   {{"topic", std::string(to_string(d.topic))},
                    {"msg", std::to_string(std::get<MessageId>(d.item))},
                    {"payload", d.message.summary}});
  }
  for (auto& [topic, handler] : subscribers_) {
    if (topic == d.topic) handler(d);
  }
}

std::vector<Delivery> EventBus::advance_until(Timestamp t) {
  check_not_past(t, "advance");
  std::vector<Delivery> delivered;
  while (true) {
    drop_cancelled_top();
    if (queue_.empty() || queue_.top().fire_at > t) break;
    // priority_queue::top is const; the entry is copied out before popping.
    Entry e = queue_.top();
    queue_.pop();
    now_ = e.fire_at;
    if (const auto* handle = std::get_if<TimerHandle>(&e.item)) {
      timers_[handle->id] = TimerState::Delivered;
    }
    Delivery d{e.fire_at, e.seq, e.topic, e.item, std::move(e.message)};
    dispatch(d);
    delivered.push_back(std::move(d));
  }
  now_ = t;
  return delivered;
}

}  // namespace tpqd
