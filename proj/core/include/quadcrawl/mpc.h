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


// Ground-reaction-force model predictive control on a single-rigid-body
// torso with roll and pitch held at zero.
//
// State x = [p (3), yaw, v (3), yaw rate]. Over one step of length dt with
// forces held constant,
//
//   a     = sum_i f_i / m - g e_z
//   alpha = sum_i (r_i x f_i)_z / I_zz,   r_i = foot_i - p
//
// integrated exactly (constant acceleration). The horizon problem is a
// condensed dense QP over the stance-foot forces.

#ifndef QUADCRAWL_MPC_H_
#define QUADCRAWL_MPC_H_

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "quadcrawl/types.h"

namespace quadcrawl {

struct SrbState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double yaw_rate = 0.0;

  Vector8d Flatten() const;
  static SrbState Unflatten(const Vector8d& v);
  TorsoPose Pose() const;
  Eigen::Vector4d Twist() const;
  bool IsFinite() const;
};

struct MpcConfig {
  int horizon = 10;    // M
  double step = 0.05;  // seconds
  // Diagonal of Q over [p, yaw, v, yaw rate].
  Vector8d state_weights = (Vector8d() << 50, 50, 50, 50, 10, 10, 10, 10)
                               .finished();
  // Weight on the deviation of each stance force from its share of the
  // weight, (0, 0, m g / n_stance).
  double force_weight = 1e-3;
  // Per-foot vertical force cap as a multiple of the robot weight.
  double max_force_factor = 2.0;

  // Throws std::invalid_argument.
  void Validate() const;
};

// Inscribed friction pyramid as rows G with G f >= 0:
//   mu' fz - fx, mu' fz + fx, mu' fz - fy, mu' fz + fy, fz
// where mu' = mu / sqrt(2).
Eigen::Matrix<double, 5, 3> FrictionPyramid(double mu);

// Largest violation of the pyramid (0 when feasible).
double PyramidViolation(const Eigen::Vector3d& force, double mu);

class MpcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MpcSolution {
  // One entry per horizon step; forces[0] is the one to execute.
  std::vector<GroundReactionForce> forces;
  // Predicted states x_1 .. x_M under the solution.
  std::vector<SrbState> predicted;
  double cost = 0.0;
  int qp_iterations = 0;
  // Largest pyramid / force-cap violation over the whole sequence.
  double max_constraint_violation = 0.0;
};

// Solves the horizon problem. `reference` holds x_1 .. x_M and `stance` the
// contact flags of every step; `feet` are world-frame foot positions. Throws
// MpcError on a step without stance feet or an infeasible QP, and
// std::invalid_argument on malformed input.
MpcSolution SolveGrfMpc(const SrbState& current,
                        const std::vector<SrbState>& reference,
                        const std::vector<std::array<bool, kNumLegs>>& stance,
                        const std::array<Eigen::Vector3d, kNumLegs>& feet,
                        const QuadrupedParams& params, const MpcConfig& config);

// The model's one-step transition with forces held for `dt`.
SrbState PropagateSrb(const SrbState& state, const GroundReactionForce& grf,
                      const std::array<Eigen::Vector3d, kNumLegs>& feet,
                      const QuadrupedParams& params, double dt);

// Constant-velocity extrapolation of `current` along `velocity` over the
// horizon: entry k (1-based) sits k * step ahead.
std::vector<SrbState> BuildReference(const Eigen::Vector4d& velocity,
                                     const SrbState& current,
                                     const MpcConfig& config);

// tau = -J^T f for one leg, with f expressed in the hip frame.
Eigen::Vector3d LegTorqueFromForce(const Eigen::Matrix3d& jacobian,
                                   const Eigen::Vector3d& force);

// Joint torques realizing the stance forces (world frame) with the torso at
// `yaw`, clamped to the torque limits. Swing legs get zero. Throws
// std::runtime_error naming the leg if a stance leg is singular.
Vector12d GrfToTorques(const GroundReactionForce& grf,
                       const LegJointState& legs, double yaw,
                       const QuadrupedParams& params);

}  // namespace quadcrawl

#endif  // QUADCRAWL_MPC_H_
