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

#include <optional>
#include <string>

#include "tpqd/domain.hpp"
#include "tpqd/taxonomy.hpp"

namespace tpqd {

/// Longitudinal vehicle state. Units: meters, m/s, m/s^2.
struct VehicleState {
  double position = 0.0;
  double speed = 0.0;
  double max_decel = 5.0;
  double target_speed = 0.0;  // speed the active command settles at
  ActionSpec commanded{{ActionCommand::Continue}};

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Speed the vehicle settles at under `action`, starting from `speed`.
/// Stopping commands win over slowing, slowing over holding.
double target_speed_for(const ActionSpec& action, double speed, double slow_factor);

/// Latches `action` as the active command.
VehicleState apply_command(VehicleState state, const ActionSpec& action, double slow_factor);

/// Integrates dt seconds under the active command: constant deceleration at
/// max_decel until target_speed, then constant speed. Requires dt > 0.
VehicleState step_world(const VehicleState& state, double dt);

/// Convenience form: latch `action`, then integrate.
VehicleState step_world(const VehicleState& state, const ActionSpec& action, double dt,
                        double slow_factor = 0.5);

/// Scripted object on the corridor. Truth flags follow the taxonomy.
struct WorldObject {
  ObjectClass truth = ObjectClass::Debris;
  double position = 0.0;
  double speed = 0.0;  // along the corridor; negative means oncoming
  bool adjacent = false;  // in the passing lane; blocks only after a maneuver

  bool obstructive() const { return is_obstructive(truth); }
  bool avoidable() const { return is_avoidable(truth); }

  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

enum class Outcome : std::uint8_t { SafeStop, SafePass, Collision, SafetyViolationFault };

std::string_view to_string(Outcome outcome);

/// One vehicle and at most one object, integrated exactly between calls.
class World {
 public:
  World(VehicleState vehicle, std::optional<WorldObject> object, double slow_factor);

  double time() const { return time_; }
  const VehicleState& vehicle() const { return vehicle_; }
  const std::optional<WorldObject>& object() const { return object_; }

  /// Distance from vehicle to object (negative once passed).
  double gap() const;
  double closing_speed() const;

  /// Integrates to absolute time t (seconds). Detects contact inside the
  /// interval, not only at its end.
  void advance_to(double t);

  /// Latches the command; steering actions mark an avoidable object avoided,
  /// a maneuver moves the vehicle into an adjacent object's lane, agreement
  /// resolves the conflict when `agreement_possible`.
  void apply(const ActionSpec& action, bool agreement_possible);

  bool collided() const { return collision_time_.has_value(); }
  std::optional<double> collision_time() const { return collision_time_; }
  bool avoided() const { return avoided_; }
  /// The object is in the vehicle's path and has not been avoided.
  bool blocking() const;
  /// Closing speed at contact (0 if none).
  double impact_speed() const { return impact_speed_; }
  bool stopping_commanded() const { return stopping_commanded_; }
  bool any_command() const { return any_command_; }

  /// Vehicle is past the object and the object was passable.
  bool passed() const;

  /// No further change can happen without a new command.
  bool quiescent() const;

  /// Distance the vehicle would overrun the object if it braked now
  /// (positive means it stops short).
  double stopping_margin() const;

 private:
  VehicleState vehicle_;
  std::optional<WorldObject> object_;
  double slow_factor_;
  double time_ = 0.0;
  bool avoided_ = false;
  bool engaged_ = false;
  double impact_speed_ = 0.0;
  bool stopping_commanded_ = false;
  bool any_command_ = false;
  std::optional<double> collision_time_;
};

}  // namespace tpqd
