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

// Shared domain types. All quantities are SI (meters, seconds, radians,
// Newtons). Legs are always ordered FL, FR, RL, RR.

#ifndef QUADCRAWL_TYPES_H_
#define QUADCRAWL_TYPES_H_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace quadcrawl {

using Vector8d = Eigen::Matrix<double, 8, 1>;
using Vector12d = Eigen::Matrix<double, 12, 1>;

inline constexpr int kNumLegs = 4;
enum Leg : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };
inline constexpr std::array<Leg, kNumLegs> kAllLegs = {kFrontLeft, kFrontRight,
                                                       kRearLeft, kRearRight};
const char* LegName(int leg);

// +1 for left legs, -1 for right legs.
inline double LegSide(int leg) { return (leg % 2 == 0) ? 1.0 : -1.0; }

// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on non-finite
// input.
double NormalizeYaw(double angle);

// Torso pose s = [x, y, z, yaw]. Roll and pitch are held at zero.
struct TorsoPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.28;
  double yaw = 0.0;

  Eigen::Vector4d AsVector() const { return {x, y, z, yaw}; }
  Eigen::Vector3d Position() const { return {x, y, z}; }
  static TorsoPose FromVector(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  // z > 0, finite, yaw in (-pi, pi].
  bool IsValid() const;
};

// Reduced-model state x = [s, s_dot] (pose followed by its time derivative).
struct TorsoState {
  TorsoPose pose;
  Eigen::Vector4d twist = Eigen::Vector4d::Zero();

  Vector8d Flatten() const;
  static TorsoState Unflatten(const Vector8d& v);
};

// Reduced-model command u = s_ddot.
struct TorsoCommand {
  Eigen::Vector4d accel = Eigen::Vector4d::Zero();
};

struct TrajectoryKnot {
  double time = 0.0;
  TorsoState state;
  TorsoCommand command;
};

// N + 1 knots uniformly spaced on [0, total_time].
struct TorsoTrajectory {
  double total_time = 0.0;
  std::vector<TrajectoryKnot> knots;

  int num_intervals() const { return static_cast<int>(knots.size()) - 1; }
  // Throws std::invalid_argument when times are not uniform/increasing.
  void CheckInvariants() const;
};

struct BoxObstacle {
  std::string name;
  Eigen::Vector3d min_corner = Eigen::Vector3d::Zero();
  Eigen::Vector3d max_corner = Eigen::Vector3d::Ones();

  Eigen::Vector3d center() const { return 0.5 * (min_corner + max_corner); }
  Eigen::Vector3d half_extent() const {
    return 0.5 * (max_corner - min_corner);
  }
};

// Obstacles plus the box bounds of the reduced model.
struct World {
  std::vector<BoxObstacle> obstacles;
  Vector8d state_lower;
  Vector8d state_upper;
  Eigen::Vector4d command_lower;
  Eigen::Vector4d command_upper;
  double clearance = 0.04;

  // Default bounds: |v_xy| <= 0.5 m/s, |v_z| <= 0.3 m/s, |yaw rate| <= 1,
  // |u| <= 1 per axis, z in [0.12, 0.35] m. No obstacles.
  static World Default();
  // Throws std::invalid_argument naming the violated invariant.
  void Validate() const;

  Eigen::Vector4d velocity_lower() const { return state_lower.tail<4>(); }
  Eigen::Vector4d velocity_upper() const { return state_upper.tail<4>(); }
};

struct QuadrupedParams {
  double mass = 12.0;
  Eigen::Vector3d inertia_diag{0.07, 0.26, 0.242};
  std::array<Eigen::Vector3d, kNumLegs> hip_offsets{
      Eigen::Vector3d{0.183, 0.047, 0.0}, Eigen::Vector3d{0.183, -0.047, 0.0},
      Eigen::Vector3d{-0.183, 0.047, 0.0},
      Eigen::Vector3d{-0.183, -0.047, 0.0}};
  // Abduction offset, thigh, calf.
  Eigen::Vector3d link_lengths{0.08, 0.21, 0.21};
  Vector12d torque_min = Vector12d::Constant(-33.5);
  Vector12d torque_max = Vector12d::Constant(33.5);
  Vector12d joint_min;
  Vector12d joint_max;
  double mu = 0.6;
  double gravity = 9.81;

  QuadrupedParams();
  void Validate() const;
  double weight() const { return mass * gravity; }
};

struct LegJointState {
  Vector12d q = Vector12d::Zero();
  Vector12d qdot = Vector12d::Zero();

  Eigen::Vector3d leg_q(int leg) const { return q.segment<3>(3 * leg); }
  Eigen::Vector3d leg_qdot(int leg) const { return qdot.segment<3>(3 * leg); }
};

// Per-foot world-frame contact forces. Swing feet carry exactly zero force.
struct GroundReactionForce {
  std::array<Eigen::Vector3d, kNumLegs> force{
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  std::array<bool, kNumLegs> stance{true, true, true, true};

  Eigen::Vector3d Total() const;
  Vector12d Flatten() const;
};

struct VelocitySample {
  Eigen::Vector4d input = Eigen::Vector4d::Zero();
  Eigen::Vector4d target = Eigen::Vector4d::Zero();
};

}  // namespace quadcrawl

#endif  // QUADCRAWL_TYPES_H_
