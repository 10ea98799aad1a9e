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


#include "quadcrawl/gait.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace quadcrawl {
namespace {

double Frac(double x) { return x - std::floor(x); }

Eigen::Matrix3d RotX(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

// Sagittal-plane foot position p' of the leg chain.
Eigen::Vector3d SagittalPosition(int leg, const Eigen::Vector3d& q,
                                 const QuadrupedParams& params) {
  const double l1 = params.link_lengths[0];
  const double l2 = params.link_lengths[1];
  const double l3 = params.link_lengths[2];
  const double s1 = std::sin(q[1]);
  const double c1 = std::cos(q[1]);
  const double s12 = std::sin(q[1] + q[2]);
  const double c12 = std::cos(q[1] + q[2]);
  return {-l2 * s1 - l3 * s12, LegSide(leg) * l1, -l2 * c1 - l3 * c12};
}

}  // namespace

void GaitSchedule::Validate() const {
  if (!(cycle_time > 0.0)) {
    throw std::invalid_argument("gait: cycle_time must be > 0");
  }
  if (!(duty > 0.0 && duty < 1.0)) {
    throw std::invalid_argument("gait: duty must be in (0, 1)");
  }
  for (double offset : offsets) {
    if (!std::isfinite(offset)) {
      throw std::invalid_argument("gait: offsets must be finite");
    }
  }
}

std::array<LegPhase, kNumLegs> GaitPhase(double time,
                                         const GaitSchedule& schedule) {
  if (!(time >= 0.0) || !std::isfinite(time)) {
    throw std::invalid_argument("GaitPhase: time must be finite and >= 0");
  }
  std::array<LegPhase, kNumLegs> out;
  const double cycle_phase = time / schedule.cycle_time;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const double phi = Frac(cycle_phase + schedule.offsets[leg]);
    if (phi < schedule.duty) {
      out[leg] = {true, phi / schedule.duty};
    } else {
      out[leg] = {false,
                  std::min((phi - schedule.duty) / (1.0 - schedule.duty),
                           std::nextafter(1.0, 0.0))};
    }
  }
  return out;
}

Eigen::Vector3d RaibertFootstep(const Eigen::Vector3d& hip_position,
                                const Eigen::Vector2d& desired_velocity,
                                const Eigen::Vector2d& actual_velocity,
                                double stance_duration, double gain,
                                double ground_height) {
  const Eigen::Vector2d xy = hip_position.head<2>() +
                             0.5 * stance_duration * desired_velocity +
                             gain * (actual_velocity - desired_velocity);
  return {xy[0], xy[1], ground_height};
}

Eigen::Vector3d SwingPosition(const SwingPlan& plan) {
  if (!(plan.phase >= 0.0 && plan.phase <= 1.0)) {
    throw std::invalid_argument("SwingPosition: phase must be in [0, 1]");
  }
  if (!(plan.apex_height > 0.0)) {
    throw std::invalid_argument("SwingPosition: apex_height must be > 0");
  }
  if (plan.phase == 0.0) return plan.liftoff;
  if (plan.phase == 1.0) return plan.touchdown;
  const double s = plan.phase;
  const double blend = s * s * (3.0 - 2.0 * s);
  Eigen::Vector3d p = plan.liftoff + blend * (plan.touchdown - plan.liftoff);
  p.z() = plan.liftoff.z() + s * (plan.touchdown.z() - plan.liftoff.z()) +
          plan.apex_height * std::sin(std::numbers::pi * s);
  return p;
}

Eigen::Vector3d LegForwardKinematics(int leg, const Eigen::Vector3d& q,
                                     const QuadrupedParams& params) {
  return RotX(q[0]) * SagittalPosition(leg, q, params);
}

Eigen::Matrix3d LegJacobian(int leg, const Eigen::Vector3d& q,
                            const QuadrupedParams& params) {
  const double l3 = params.link_lengths[2];
  const Eigen::Vector3d p = SagittalPosition(leg, q, params);
  const double c0 = std::cos(q[0]);
  const double s0 = std::sin(q[0]);
  Eigen::Matrix3d drx;
  drx << 0, 0, 0, 0, -s0, -c0, 0, c0, -s0;
  const double s12 = std::sin(q[1] + q[2]);
  const double c12 = std::cos(q[1] + q[2]);
  const Eigen::Vector3d dp1(p.z(), 0.0, -p.x());
  const Eigen::Vector3d dp2(-l3 * c12, 0.0, l3 * s12);
  const Eigen::Matrix3d rx = RotX(q[0]);
  Eigen::Matrix3d jac;
  jac.col(0) = drx * p;
  jac.col(1) = rx * dp1;
  jac.col(2) = rx * dp2;
  return jac;
}

Eigen::Vector3d NearestReachable(int leg, const Eigen::Vector3d& foot,
                                 const QuadrupedParams& params) {
  const double l1 = params.link_lengths[0];
  const double reach = params.link_lengths[1] + params.link_lengths[2];
  Eigen::Vector3d p = foot;
  double r_yz = std::hypot(p.y(), p.z());
  if (r_yz < l1) {
    // Push out radially in the y-z plane; straight down when degenerate.
    if (r_yz < 1e-12) {
      p.y() = 0.0;
      p.z() = -l1;
    } else {
      p.y() *= l1 / r_yz;
      p.z() *= l1 / r_yz;
    }
    r_yz = l1;
  }
  const double z_sag = -std::sqrt(std::max(0.0, r_yz * r_yz - l1 * l1));
  const double sagittal = std::hypot(p.x(), z_sag);
  if (sagittal <= reach) return p;
  const double scale = reach / sagittal;
  const double side_l1 = LegSide(leg) * l1;
  const double q0 = std::atan2(p.z(), p.y()) - std::atan2(z_sag, side_l1);
  return RotX(q0) * Eigen::Vector3d(p.x() * scale, side_l1, z_sag * scale);
}

IkResult LegInverseKinematics(int leg, const Eigen::Vector3d& foot,
                              const QuadrupedParams& params) {
  if (!foot.allFinite()) {
    throw std::invalid_argument("LegInverseKinematics: non-finite target");
  }
  const Eigen::Vector3d nearest = NearestReachable(leg, foot, params);
  if ((nearest - foot).norm() > 1e-9) {
    std::ostringstream msg;
    msg << "leg " << LegName(leg) << ": target (" << foot.transpose()
        << ") unreachable; nearest reachable point (" << nearest.transpose()
        << ")";
    throw UnreachableError(msg.str(), nearest);
  }
  const double l1 = params.link_lengths[0];
  const double l2 = params.link_lengths[1];
  const double l3 = params.link_lengths[2];
  const double side_l1 = LegSide(leg) * l1;
  const double z_sag = -std::sqrt(
      std::max(0.0, foot.y() * foot.y() + foot.z() * foot.z() - l1 * l1));
  IkResult out;
  out.q[0] = std::atan2(foot.z(), foot.y()) - std::atan2(z_sag, side_l1);
  const double length_sq = foot.x() * foot.x() + z_sag * z_sag;
  const double cos_knee = std::clamp(
      (length_sq - l2 * l2 - l3 * l3) / (2.0 * l2 * l3), -1.0, 1.0);
  out.q[2] = -std::acos(cos_knee);
  out.q[1] = std::atan2(-foot.x(), -z_sag) -
             std::atan2(l3 * std::sin(out.q[2]), l2 + l3 * std::cos(out.q[2]));
  out.q[0] = NormalizeYaw(out.q[0]);
  const Eigen::Vector3d lo = params.joint_min.segment<3>(3 * leg);
  const Eigen::Vector3d hi = params.joint_max.segment<3>(3 * leg);
  const Eigen::Vector3d clamped = out.q.cwiseMax(lo).cwiseMin(hi);
  out.clamped = (clamped - out.q).cwiseAbs().maxCoeff() > 1e-12;
  out.q = clamped;
  return out;
}

Eigen::Vector3d NominalJointAngles(int leg, double height,
                                   const QuadrupedParams& params) {
  const Eigen::Vector3d foot(0.0, LegSide(leg) * params.link_lengths[0],
                             -height);
  return LegInverseKinematics(leg, foot, params).q;
}

Eigen::Vector3d PdSwingTorque(const Eigen::Vector3d& q_desired,
                              const Eigen::Vector3d& q,
                              const Eigen::Vector3d& qdot, double kp,
                              double kd, const Eigen::Vector3d& tau_min,
                              const Eigen::Vector3d& tau_max) {
  const Eigen::Vector3d tau = kp * (q_desired - q) - kd * qdot;
  return tau.cwiseMax(tau_min).cwiseMin(tau_max);
}

void GaitConfig::Validate() const {
  schedule.Validate();
  if (!(raibert_gain >= 0.0)) {
    throw std::invalid_argument("gait: raibert_gain must be >= 0");
  }
  if (!(swing_apex > 0.0)) {
    throw std::invalid_argument("gait: swing_apex must be > 0");
  }
  if (!(kp > 0.0) || !(kd > 0.0)) {
    throw std::invalid_argument("gait: kp and kd must be > 0");
  }
}

}  // namespace quadcrawl
