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


#include "quadcrawl/mpc.h"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "quadcrawl/gait.h"
#include "quadcrawl/qp_solver.h"

namespace quadcrawl {
namespace {

Eigen::Matrix3d RotZ(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

// Maps one foot's force to [linear accel; yaw accel] for a lever arm r.
Eigen::Matrix<double, 4, 3> ForceToAcceleration(const Eigen::Vector3d& r,
                                                const QuadrupedParams& params) {
  Eigen::Matrix<double, 4, 3> map = Eigen::Matrix<double, 4, 3>::Zero();
  map.topRows<3>() = Eigen::Matrix3d::Identity() / params.mass;
  map(3, 0) = -r.y() / params.inertia_diag.z();
  map(3, 1) = r.x() / params.inertia_diag.z();
  return map;
}

}  // namespace

Vector8d SrbState::Flatten() const {
  Vector8d v;
  v << position, yaw, velocity, yaw_rate;
  return v;
}

SrbState SrbState::Unflatten(const Vector8d& v) {
  SrbState s;
  s.position = v.head<3>();
  s.yaw = v[3];
  s.velocity = v.segment<3>(4);
  s.yaw_rate = v[7];
  return s;
}

TorsoPose SrbState::Pose() const {
  return {position.x(), position.y(), position.z(), NormalizeYaw(yaw)};
}

Eigen::Vector4d SrbState::Twist() const {
  return {velocity.x(), velocity.y(), velocity.z(), yaw_rate};
}

bool SrbState::IsFinite() const { return Flatten().allFinite(); }

void MpcConfig::Validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc: horizon must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("mpc: step must be > 0");
  if (!(state_weights.array() >= 0.0).all()) {
    throw std::invalid_argument("mpc: state weights must be >= 0");
  }
  if (!(force_weight > 0.0)) {
    throw std::invalid_argument("mpc: force_weight must be > 0");
  }
  if (!(max_force_factor > 0.0)) {
    throw std::invalid_argument("mpc: max_force_factor must be > 0");
  }
}

Eigen::Matrix<double, 5, 3> FrictionPyramid(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("FrictionPyramid: mu must be > 0");
  const double m = mu / std::sqrt(2.0);
  Eigen::Matrix<double, 5, 3> g;
  g << -1, 0, m,  //
      1, 0, m,    //
      0, -1, m,   //
      0, 1, m,    //
      0, 0, 1;
  return g;
}

double PyramidViolation(const Eigen::Vector3d& force, double mu) {
  return std::max(0.0, -(FrictionPyramid(mu) * force).minCoeff());
}

SrbState PropagateSrb(const SrbState& state, const GroundReactionForce& grf,
                      const std::array<Eigen::Vector3d, kNumLegs>& feet,
                      const QuadrupedParams& params, double dt) {
  Eigen::Vector4d accel(0.0, 0.0, -params.gravity, 0.0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!grf.stance[leg]) continue;
    accel += ForceToAcceleration(feet[leg] - state.position, params) *
             grf.force[leg];
  }
  SrbState next = state;
  next.position += dt * state.velocity + 0.5 * dt * dt * accel.head<3>();
  next.yaw += dt * state.yaw_rate + 0.5 * dt * dt * accel[3];
  next.velocity += dt * accel.head<3>();
  next.yaw_rate += dt * accel[3];
  return next;
}

MpcSolution SolveGrfMpc(const SrbState& current,
                        const std::vector<SrbState>& reference,
                        const std::vector<std::array<bool, kNumLegs>>& stance,
                        const std::array<Eigen::Vector3d, kNumLegs>& feet,
                        const QuadrupedParams& params, const MpcConfig& config) {
  config.Validate();
  const int horizon = config.horizon;
  if (static_cast<int>(reference.size()) != horizon ||
      static_cast<int>(stance.size()) != horizon) {
    throw std::invalid_argument(
        "SolveGrfMpc: reference and stance must have one entry per step");
  }
  if (!current.IsFinite()) {
    throw std::invalid_argument("SolveGrfMpc: non-finite current state");
  }
  for (const SrbState& r : reference) {
    if (!r.IsFinite()) {
      throw std::invalid_argument("SolveGrfMpc: non-finite reference");
    }
  }
  for (const Eigen::Vector3d& foot : feet) {
    if (!foot.allFinite()) {
      throw std::invalid_argument("SolveGrfMpc: non-finite foot position");
    }
  }

  // Variable layout: 3 force components per stance foot per step.
  std::vector<std::array<int, kNumLegs>> column(horizon);
  int n = 0;
  for (int j = 0; j < horizon; ++j) {
    int count = 0;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      column[j][leg] = stance[j][leg] ? n + 3 * count++ : -1;
    }
    if (count == 0) {
      throw MpcError("SolveGrfMpc: no stance foot at step " +
                     std::to_string(j) + " (free fall)");
    }
    n += 3 * count;
  }

  const double dt = config.step;
  const double weight = params.weight();
  // Yaw references unwrapped next to their predecessor.
  std::vector<Vector8d> targets(horizon);
  double previous_yaw = current.yaw;
  for (int k = 0; k < horizon; ++k) {
    targets[k] = reference[k].Flatten();
    targets[k][3] = previous_yaw + NormalizeYaw(reference[k].yaw - previous_yaw);
    previous_yaw = targets[k][3];
  }

  // Per-step input map accel_j = G_j u + a0, with lever arms measured from
  // the position the model expects at that step.
  const Eigen::Vector4d a0(0.0, 0.0, -params.gravity, 0.0);
  std::vector<Eigen::MatrixXd> input_map(horizon, Eigen::MatrixXd::Zero(4, n));
  for (int j = 0; j < horizon; ++j) {
    const Eigen::Vector3d com =
        j == 0 ? current.position : reference[j - 1].position;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (column[j][leg] < 0) continue;
      input_map[j].middleCols<3>(column[j][leg]) =
          ForceToAcceleration(feet[leg] - com, params);
    }
  }

  // x_k = x_free_k + S_k u, k = 1..M.
  const Vector8d x0 = current.Flatten();
  const Eigen::VectorXd q = config.state_weights;
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd gradient = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::MatrixXd> sensitivity(horizon);
  std::vector<Vector8d> free_state(horizon);
  for (int k = 1; k <= horizon; ++k) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(8, n);
    Vector8d x_free;
    x_free.head<4>() = x0.head<4>() + k * dt * x0.tail<4>();
    x_free.tail<4>() = x0.tail<4>();
    for (int j = 0; j < k; ++j) {
      const double pos_gain = dt * dt * (k - j - 0.5);
      s.topRows<4>() += pos_gain * input_map[j];
      s.bottomRows<4>() += dt * input_map[j];
      x_free.head<4>() += pos_gain * a0;
      x_free.tail<4>() += dt * a0;
    }
    const Eigen::MatrixXd qs = q.asDiagonal() * s;
    hessian.noalias() += s.transpose() * qs;
    gradient.noalias() += qs.transpose() * (x_free - targets[k - 1]);
    sensitivity[k - 1] = std::move(s);
    free_state[k - 1] = x_free;
  }
  Eigen::VectorXd share = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < horizon; ++j) {
    int count = 0;
    for (int leg = 0; leg < kNumLegs; ++leg) count += stance[j][leg] ? 1 : 0;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (column[j][leg] >= 0) share[column[j][leg] + 2] = weight / count;
    }
  }
  hessian.diagonal().array() += config.force_weight;
  gradient -= config.force_weight * share;

  // Pyramid rows and the vertical cap, 6 rows per stance foot.
  const int num_feet = n / 3;
  const double f_max = config.max_force_factor * weight;
  const Eigen::Matrix<double, 5, 3> pyramid = FrictionPyramid(params.mu);
  nlp::QpProblem qp;
  qp.hessian = hessian;
  qp.gradient = gradient;
  qp.equality_matrix.resize(0, n);
  qp.equality_rhs.resize(0);
  qp.inequality_matrix = Eigen::MatrixXd::Zero(6 * num_feet, n);
  qp.inequality_rhs = Eigen::VectorXd::Zero(6 * num_feet);
  for (int f = 0; f < num_feet; ++f) {
    qp.inequality_matrix.block<5, 3>(6 * f, 3 * f) = pyramid;
    qp.inequality_matrix(6 * f + 5, 3 * f + 2) = -1.0;
    qp.inequality_rhs[6 * f + 5] = -f_max;
  }
  const nlp::QpSolution sol = nlp::SolveQp(qp);
  if (sol.status != nlp::QpStatus::kOptimal) {
    throw MpcError(std::string("SolveGrfMpc: force QP ") +
                   nlp::ToString(sol.status));
  }

  MpcSolution out;
  out.qp_iterations = sol.iterations;
  out.forces.resize(horizon);
  for (int j = 0; j < horizon; ++j) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      out.forces[j].stance[leg] = stance[j][leg];
      if (column[j][leg] < 0) continue;
      const Eigen::Vector3d f = sol.x.segment<3>(column[j][leg]);
      out.forces[j].force[leg] = f;
      out.max_constraint_violation =
          std::max({out.max_constraint_violation, PyramidViolation(f, params.mu),
                    f.z() - f_max});
    }
  }
  double cost = config.force_weight * (sol.x - share).squaredNorm();
  for (int k = 0; k < horizon; ++k) {
    const Vector8d x = free_state[k] + sensitivity[k] * sol.x;
    const Vector8d e = x - targets[k];
    cost += e.dot(q.asDiagonal() * e);
    out.predicted.push_back(SrbState::Unflatten(x));
  }
  out.cost = cost;
  return out;
}

std::vector<SrbState> BuildReference(const Eigen::Vector4d& velocity,
                                     const SrbState& current,
                                     const MpcConfig& config) {
  if (!velocity.allFinite() || !current.IsFinite()) {
    throw std::invalid_argument("BuildReference: non-finite input");
  }
  std::vector<SrbState> out;
  out.reserve(config.horizon);
  for (int k = 1; k <= config.horizon; ++k) {
    SrbState s;
    s.position = current.position + k * config.step * velocity.head<3>();
    s.yaw = current.yaw + k * config.step * velocity[3];
    s.velocity = velocity.head<3>();
    s.yaw_rate = velocity[3];
    out.push_back(s);
  }
  return out;
}

Eigen::Vector3d LegTorqueFromForce(const Eigen::Matrix3d& jacobian,
                                   const Eigen::Vector3d& force) {
  return -jacobian.transpose() * force;
}

Vector12d GrfToTorques(const GroundReactionForce& grf,
                       const LegJointState& legs, double yaw,
                       const QuadrupedParams& params) {
  const Eigen::Matrix3d world_to_body = RotZ(yaw).transpose();
  Vector12d tau = Vector12d::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    if (!grf.stance[leg]) continue;
    const Eigen::Matrix3d jac = LegJacobian(leg, legs.leg_q(leg), params);
    if (std::abs(jac.determinant()) < 1e-9) {
      throw std::runtime_error(std::string("GrfToTorques: leg ") +
                               LegName(leg) + " is singular");
    }
    tau.segment<3>(3 * leg) =
        LegTorqueFromForce(jac, world_to_body * grf.force[leg]);
  }
  return tau.cwiseMax(params.torque_min).cwiseMin(params.torque_max);
}

}  // namespace quadcrawl
