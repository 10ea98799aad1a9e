// Copyright 2026 The quadcrawl Authors
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

#include "quadcrawl/types.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace quadcrawl {

const char* LegName(int leg) {
  static constexpr const char* kNames[kNumLegs] = {"FL", "FR", "RL", "RR"};
  if (leg < 0 || leg >= kNumLegs) return "??";
  return kNames[leg];
}

double NormalizeYaw(double angle) {
  if (!std::isfinite(angle)) {
    throw std::invalid_argument("NormalizeYaw: non-finite angle");
  }
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, kTwoPi);  // (-2pi, 2pi)
  if (wrapped > kPi) wrapped -= kTwoPi;
  if (wrapped <= -kPi) wrapped += kTwoPi;
  return wrapped;
}

bool TorsoPose::IsValid() const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
      !std::isfinite(yaw)) {
    return false;
  }
  return z > 0.0 && yaw > -std::numbers::pi && yaw <= std::numbers::pi;
}

Vector8d TorsoState::Flatten() const {
  Vector8d v;
  v << pose.AsVector(), twist;
  return v;
}

TorsoState TorsoState::Unflatten(const Vector8d& v) {
  TorsoState s;
  s.pose = TorsoPose::FromVector(v.head<4>());
  s.twist = v.tail<4>();
  return s;
}

void TorsoTrajectory::CheckInvariants() const {
  if (knots.empty()) throw std::invalid_argument("trajectory has no knots");
  if (knots.front().time != 0.0) {
    throw std::invalid_argument("trajectory must start at t = 0");
  }
  if (knots.size() == 1) return;
  const double dt = total_time / num_intervals();
  for (size_t k = 0; k < knots.size(); ++k) {
    if (std::abs(knots[k].time - dt * static_cast<double>(k)) > 1e-9) {
      std::ostringstream msg;
      msg << "trajectory knot " << k << " is off the uniform grid";
      throw std::invalid_argument(msg.str());
    }
    if (k > 0 && !(knots[k].time > knots[k - 1].time)) {
      throw std::invalid_argument("trajectory times must strictly increase");
    }
  }
}

World World::Default() {
  constexpr double kPi = std::numbers::pi;
  World w;
  w.state_lower << -10.0, -10.0, 0.12, -2.0 * kPi, -0.5, -0.5, -0.3, -1.0;
  w.state_upper << 10.0, 10.0, 0.35, 2.0 * kPi, 0.5, 0.5, 0.3, 1.0;
  w.command_lower = Eigen::Vector4d::Constant(-1.0);
  w.command_upper = Eigen::Vector4d::Constant(1.0);
  w.clearance = 0.04;
  return w;
}

void World::Validate() const {
  for (int i = 0; i < 8; ++i) {
    if (!(state_lower[i] <= state_upper[i])) {
      throw std::invalid_argument("world: state_lower > state_upper at index " +
                                  std::to_string(i));
    }
  }
  for (int i = 0; i < 4; ++i) {
    if (!(command_lower[i] <= command_upper[i])) {
      throw std::invalid_argument(
          "world: command_lower > command_upper at index " +
          std::to_string(i));
    }
  }
  if (!(clearance >= 0.0)) {
    throw std::invalid_argument("world: clearance must be >= 0");
  }
  for (size_t i = 0; i < obstacles.size(); ++i) {
    const auto& box = obstacles[i];
    if (!(box.min_corner.array() < box.max_corner.array()).all()) {
      throw std::invalid_argument("world: obstacle " + std::to_string(i) +
                                  " has min_corner >= max_corner");
    }
  }
}

QuadrupedParams::QuadrupedParams() {
  // Per leg: abduction, hip pitch, knee.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    joint_min.segment<3>(3 * leg) << -0.8, -1.0, -2.7;
    joint_max.segment<3>(3 * leg) << 0.8, 3.0, 0.0;
  }
}

void QuadrupedParams::Validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("robot: mass must be > 0");
  if (!(inertia_diag.array() > 0.0).all()) {
    throw std::invalid_argument("robot: inertia_diag must be > 0");
  }
  if (!(mu > 0.0)) throw std::invalid_argument("robot: mu must be > 0");
  if (!(link_lengths.array() > 0.0).all()) {
    throw std::invalid_argument("robot: link lengths must be > 0");
  }
  if (!(torque_min.array() < torque_max.array()).all()) {
    throw std::invalid_argument("robot: torque_min must be < torque_max");
  }
  if (!(joint_min.array() < joint_max.array()).all()) {
    throw std::invalid_argument("robot: joint_min must be < joint_max");
  }
}

Eigen::Vector3d GroundReactionForce::Total() const {
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (stance[leg]) total += force[leg];
  }
  return total;
}

Vector12d GroundReactionForce::Flatten() const {
  Vector12d v;
  for (int leg = 0; leg < kNumLegs; ++leg) v.segment<3>(3 * leg) = force[leg];
  return v;
}

}  // namespace quadcrawl
