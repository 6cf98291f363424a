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

#include "tpqd/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tpqd {
namespace {

bool is_stopping(ActionCommand c) {
  return c == ActionCommand::Brake || c == ActionCommand::Stop || c == ActionCommand::GiveWay;
}

bool is_slowing(ActionCommand c) {
  return c == ActionCommand::SlowDown || c == ActionCommand::ContinueSlowly;
}

bool is_avoiding(ActionCommand c) {
  return c == ActionCommand::SteerAway || c == ActionCommand::Maneuver;
}

struct Motion {
  double dx;
  double v;
};

/// Closed-form displacement after s seconds of decelerating from v0 towards vt.
Motion integrate(double v0, double vt, double decel, double s) {
  vt = std::min(vt, v0);
  if (decel <= 0.0 || v0 == vt) return {v0 * s, v0};
  const double ramp = (v0 - vt) / decel;
  if (s <= ramp) return {v0 * s - 0.5 * decel * s * s, v0 - decel * s};
  return {0.5 * (v0 + vt) * ramp + vt * (s - ramp), vt};
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::SafeStop: return "SafeStop";
    case Outcome::SafePass: return "SafePass";
    case Outcome::Collision: return "Collision";
    case Outcome::SafetyViolationFault: return "SafetyViolationFault";
  }
  return "?";
}

double target_speed_for(const ActionSpec& action, double speed, double slow_factor) {
  const auto cmds = action.commands();
  if (std::any_of(cmds.begin(), cmds.end(), is_stopping)) return 0.0;
  if (std::any_of(cmds.begin(), cmds.end(), is_slowing)) return speed * slow_factor;
  return speed;
}

VehicleState apply_command(VehicleState state, const ActionSpec& action, double slow_factor) {
  state.target_speed = target_speed_for(action, state.speed, slow_factor);
  state.commanded = action;
  return state;
}

VehicleState step_world(const VehicleState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_world: dt must be > 0");
  VehicleState next = state;
  const Motion m = integrate(state.speed, state.target_speed, state.max_decel, dt);
  next.position += m.dx;
  next.speed = std::max(0.0, m.v);
  return next;
}

VehicleState step_world(const VehicleState& state, const ActionSpec& action, double dt,
                        double slow_factor) {
  return step_world(apply_command(state, action, slow_factor), dt);
}

World::World(VehicleState vehicle, std::optional<WorldObject> object, double slow_factor)
    : vehicle_(std::move(vehicle)), object_(std::move(object)), slow_factor_(slow_factor) {
  vehicle_ = apply_command(vehicle_, vehicle_.commanded, slow_factor_);
}

double World::gap() const {
  if (!object_) return std::numeric_limits<double>::infinity();
  return object_->position - vehicle_.position;
}

double World::closing_speed() const {
  if (!object_) return 0.0;
  return vehicle_.speed - object_->speed;
}

void World::advance_to(double t) {
  const double dt = t - time_;
  if (dt <= 0.0) return;
  const double v0 = vehicle_.speed;
  const double vt = vehicle_.target_speed;
  const double a = vehicle_.max_decel;

  if (object_ && !collision_time_ && blocking()) {
    const double g0 = gap();
    const double u = object_->speed;
    auto gap_at = [&](double s) { return g0 + u * s - integrate(v0, vt, a, s).dx; };
    // The gap is convex in s: it shrinks while the vehicle is faster than the
    // object and grows afterwards.
    double s_min = dt;
    if (v0 <= u) {
      s_min = 0.0;
    } else if (u >= std::min(vt, v0) && a > 0.0) {
      s_min = std::min(dt, (v0 - u) / a);
    }
    if (g0 >= 0.0 && gap_at(s_min) <= 0.0) {
      double lo = 0.0, hi = s_min;
      if (g0 == 0.0) {
        hi = 0.0;
      } else {
        for (int i = 0; i < 100; ++i) {
          const double mid = 0.5 * (lo + hi);
          (gap_at(mid) > 0.0 ? lo : hi) = mid;
        }
      }
      collision_time_ = time_ + hi;
      impact_speed_ = std::max(0.0, integrate(v0, vt, a, hi).v - u);
    }
  }

  vehicle_ = step_world(vehicle_, dt);
  if (object_) object_->position += object_->speed * dt;
  time_ = t;
}

void World::apply(const ActionSpec& action, bool agreement_possible) {
  any_command_ = true;
  vehicle_ = apply_command(vehicle_, action, slow_factor_);
  if (vehicle_.target_speed == 0.0) stopping_commanded_ = true;
  if (!object_ || collision_time_) return;
  const auto cmds = action.commands();
  if (object_->adjacent) {
    if (action.contains(ActionCommand::Maneuver)) engaged_ = true;
  } else if (object_->avoidable() && std::any_of(cmds.begin(), cmds.end(), is_avoiding)) {
    avoided_ = true;
  }
  if (agreement_possible && action.contains(ActionCommand::Agreement)) avoided_ = true;
}

bool World::blocking() const {
  if (!object_ || avoided_ || !object_->obstructive()) return false;
  return !object_->adjacent || engaged_;
}

bool World::passed() const {
  if (!object_ || collision_time_) return false;
  return gap() < 0.0 && !blocking();
}

bool World::quiescent() const {
  if (vehicle_.speed > vehicle_.target_speed) return false;
  if (!object_ || passed()) return true;
  if (gap() < 0.0) return true;
  return closing_speed() <= 0.0 || !blocking();
}

double World::stopping_margin() const {
  const double c = closing_speed();
  if (c <= 0.0 || vehicle_.max_decel <= 0.0) return gap();
  return gap() - c * c / (2.0 * vehicle_.max_decel);
}

}  // namespace tpqd
