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


// Gait scheduling, footstep placement, swing trajectories, swing-leg PD and
// 3-DOF leg kinematics.
//
// Leg frames: each leg's "hip frame" is the torso frame translated to the
// hip. Joints are abduction q0 about x, hip pitch q1 and knee q2 about the
// rotated y axis. With side = +1 (left) or -1 (right),
//
//   p' = [-l2 s1 - l3 s12,  side l1,  -l2 c1 - l3 c12]
//   p  = Rx(q0) p'
//
// The knee bends backward (q2 <= 0). The reachable set is
// {py^2 + pz^2 >= l1^2, px^2 + py^2 + pz^2 - l1^2 <= (l2 + l3)^2}.

#ifndef QUADCRAWL_GAIT_H_
#define QUADCRAWL_GAIT_H_

#include <array>
#include <stdexcept>

#include <Eigen/Core>

#include "quadcrawl/types.h"

namespace quadcrawl {

struct GaitSchedule {
  double cycle_time = 0.6;
  // Fraction of the cycle spent in stance, starting at phase 0 of each leg.
  double duty = 0.6;
  // Per-leg phase offsets; the default is a trot (diagonal pairs in sync).
  std::array<double, kNumLegs> offsets{0.0, 0.5, 0.5, 0.0};

  double stance_duration() const { return duty * cycle_time; }
  double swing_duration() const { return (1.0 - duty) * cycle_time; }
  // Throws std::invalid_argument.
  void Validate() const;
};

struct LegPhase {
  bool stance = true;
  // Progress through the current stance or swing window, in [0, 1).
  double fraction = 0.0;
};

// Throws std::invalid_argument if time < 0 or not finite.
std::array<LegPhase, kNumLegs> GaitPhase(double time,
                                         const GaitSchedule& schedule);

// Raibert heuristic:
//   hip projection + stance_duration / 2 * v_desired
//                  + gain * (v_actual - v_desired),
// with z set to ground_height.
Eigen::Vector3d RaibertFootstep(const Eigen::Vector3d& hip_position,
                                const Eigen::Vector2d& desired_velocity,
                                const Eigen::Vector2d& actual_velocity,
                                double stance_duration, double gain,
                                double ground_height = 0.0);

struct SwingPlan {
  Eigen::Vector3d liftoff = Eigen::Vector3d::Zero();
  Eigen::Vector3d touchdown = Eigen::Vector3d::Zero();
  double apex_height = 0.06;
  double phase = 0.0;
};

// Horizontal: smoothstep blend liftoff -> touchdown. Vertical: linear blend
// of the end heights plus apex * sin(pi * phase). Endpoints are exact.
// Throws std::invalid_argument for phase outside [0, 1] or apex <= 0.
Eigen::Vector3d SwingPosition(const SwingPlan& plan);

// Foot position in the hip frame.
Eigen::Vector3d LegForwardKinematics(int leg, const Eigen::Vector3d& q,
                                     const QuadrupedParams& params);

// d(foot position in hip frame) / dq.
Eigen::Matrix3d LegJacobian(int leg, const Eigen::Vector3d& q,
                            const QuadrupedParams& params);

// Raised by LegInverseKinematics for targets outside the workspace.
class UnreachableError : public std::invalid_argument {
 public:
  UnreachableError(const std::string& what, const Eigen::Vector3d& nearest)
      : std::invalid_argument(what), nearest_(nearest) {}
  const Eigen::Vector3d& nearest() const { return nearest_; }

 private:
  Eigen::Vector3d nearest_;
};

// Closest point of the leg's workspace to `foot` (the point itself when
// reachable).
Eigen::Vector3d NearestReachable(int leg, const Eigen::Vector3d& foot,
                                 const QuadrupedParams& params);

struct IkResult {
  Eigen::Vector3d q = Eigen::Vector3d::Zero();
  // True when a joint limit changed the analytic solution.
  bool clamped = false;
};

// Knee-backward solution for a foot position in the hip frame, clamped to
// the joint limits. Throws UnreachableError (tolerance 1e-9 m).
IkResult LegInverseKinematics(int leg, const Eigen::Vector3d& foot,
                              const QuadrupedParams& params);

// Joint angles with the foot straight below the hip at depth `height`.
Eigen::Vector3d NominalJointAngles(int leg, double height,
                                   const QuadrupedParams& params);

// kp (q_desired - q) - kd qdot, clamped to [tau_min, tau_max].
Eigen::Vector3d PdSwingTorque(const Eigen::Vector3d& q_desired,
                              const Eigen::Vector3d& q,
                              const Eigen::Vector3d& qdot, double kp,
                              double kd, const Eigen::Vector3d& tau_min,
                              const Eigen::Vector3d& tau_max);

struct GaitConfig {
  GaitSchedule schedule;
  double raibert_gain = 0.03;
  double swing_apex = 0.06;
  double kp = 20.0;
  double kd = 0.5;

  // Joint inertia that makes the PD loop critically damped.
  double swing_inertia() const { return kd * kd / (4.0 * kp); }
  void Validate() const;
};

}  // namespace quadcrawl

#endif  // QUADCRAWL_GAIT_H_
