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

#include <cmath>
#include <random>

#include <Eigen/LU>

#include <gtest/gtest.h>

namespace quadcrawl {
namespace {

TEST(GaitPhaseTest, TimeZeroMatchesOffsets) {
  const GaitSchedule schedule;
  const auto phase = GaitPhase(0.0, schedule);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const double offset = schedule.offsets[leg];
    EXPECT_TRUE(phase[leg].stance);
    EXPECT_NEAR(phase[leg].fraction, offset / schedule.duty, 1e-15);
  }
}

TEST(GaitPhaseTest, Periodic) {
  const GaitSchedule schedule;
  for (double t : {0.013, 0.25, 0.41, 1.777}) {
    const auto a = GaitPhase(t, schedule);
    const auto b = GaitPhase(t + schedule.cycle_time, schedule);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      EXPECT_EQ(a[leg].stance, b[leg].stance);
      EXPECT_NEAR(a[leg].fraction, b[leg].fraction, 1e-12);
      EXPECT_GE(a[leg].fraction, 0.0);
      EXPECT_LT(a[leg].fraction, 1.0);
    }
  }
}

TEST(GaitPhaseTest, TrotAlwaysHasADiagonalPairDown) {
  const GaitSchedule schedule;
  const int ticks = static_cast<int>(std::round(schedule.cycle_time / 1e-3));
  for (int i = 0; i < ticks; ++i) {
    const auto p = GaitPhase(i * 1e-3, schedule);
    const bool pair_a = p[kFrontLeft].stance && p[kRearRight].stance;
    const bool pair_b = p[kFrontRight].stance && p[kRearLeft].stance;
    EXPECT_TRUE(pair_a || pair_b) << "t = " << i * 1e-3;
    int stance = 0;
    for (const LegPhase& leg : p) stance += leg.stance;
    EXPECT_GE(stance, 2);
  }
}

TEST(GaitPhaseTest, RejectsNegativeTime) {
  EXPECT_THROW(GaitPhase(-0.1, GaitSchedule{}), std::invalid_argument);
}

TEST(RaibertFootstepTest, Examples) {
  const Eigen::Vector3d hip(0.4, -0.2, 0.28);
  EXPECT_EQ(RaibertFootstep(hip, {0, 0}, {0, 0}, 0.3, 0.03),
            Eigen::Vector3d(0.4, -0.2, 0.0));
  const Eigen::Vector3d a = RaibertFootstep(hip, {1, 0}, {1, 0}, 0.3, 0.0);
  EXPECT_NEAR(a.x() - hip.x(), 0.15, 1e-15);
  EXPECT_NEAR(a.y() - hip.y(), 0.0, 1e-15);
  const Eigen::Vector3d b = RaibertFootstep(hip, {0, 0}, {0.5, 0}, 0.3, 0.03);
  EXPECT_NEAR(b.x() - hip.x(), 0.015, 1e-15);
  EXPECT_EQ(RaibertFootstep(hip, {0, 0}, {0, 0}, 0.3, 0.03, 0.05).z(), 0.05);
}

TEST(SwingPositionTest, EndpointsAndMidpoint) {
  SwingPlan plan;
  plan.liftoff = {0.1, 0.2, 0.0};
  plan.touchdown = {0.3, 0.25, 0.0};
  plan.apex_height = 0.06;
  plan.phase = 0.0;
  EXPECT_EQ(SwingPosition(plan), plan.liftoff);
  plan.phase = 1.0;
  EXPECT_EQ(SwingPosition(plan), plan.touchdown);
  plan.phase = 0.5;
  const Eigen::Vector3d mid = SwingPosition(plan);
  EXPECT_NEAR(mid.x(), 0.2, 1e-15);
  EXPECT_NEAR(mid.y(), 0.225, 1e-15);
  EXPECT_NEAR(mid.z(), 0.06, 1e-15);
}

TEST(SwingPositionTest, ContinuousAtSwitches) {
  SwingPlan plan;
  plan.liftoff = {0.1, 0.2, 0.0};
  plan.touchdown = {0.3, 0.25, 0.0};
  plan.phase = 1e-12;
  EXPECT_LE((SwingPosition(plan) - plan.liftoff).norm(), 1e-9);
  plan.phase = 1.0 - 1e-12;
  EXPECT_LE((SwingPosition(plan) - plan.touchdown).norm(), 1e-9);
  plan.phase = 1.5;
  EXPECT_THROW(SwingPosition(plan), std::invalid_argument);
}

TEST(LegKinematicsTest, NominalStanceTriple) {
  const QuadrupedParams params;
  const double l2 = params.link_lengths[1];
  const double l3 = params.link_lengths[2];
  const double h = 0.28;
  // Equal thigh and calf: the knee closes the isosceles triangle and the hip
  // pitches forward by half the knee angle.
  const double knee = -std::acos((h * h - l2 * l2 - l3 * l3) / (2 * l2 * l3));
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d q = NominalJointAngles(leg, h, params);
    EXPECT_NEAR(q[0], 0.0, 1e-12);
    EXPECT_NEAR(q[2], knee, 1e-12);
    EXPECT_NEAR(q[1], -0.5 * knee, 1e-12);
    const Eigen::Vector3d foot = LegForwardKinematics(leg, q, params);
    EXPECT_LE((foot - Eigen::Vector3d(0.0, LegSide(leg) * 0.08, -h)).norm(),
              1e-12);
  }
}

TEST(LegKinematicsTest, InverseRoundTrip) {
  const QuadrupedParams params;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> q0(-0.7, 0.7), q1(-0.9, 2.0),
      q2(-2.6, -0.1);
  const double l2 = params.link_lengths[1];
  const double l3 = params.link_lengths[2];
  // Reachable targets are generated by forward kinematics from joint-limit
  // interior configurations on the solver's branch (foot below the hip in
  // the leg plane).
  int targets = 0;
  while (targets < 1000) {
    const int leg = targets % kNumLegs;
    const Eigen::Vector3d q(q0(rng), q1(rng), q2(rng));
    if (l2 * std::cos(q[1]) + l3 * std::cos(q[1] + q[2]) <= 0.0) continue;
    ++targets;
    const Eigen::Vector3d target = LegForwardKinematics(leg, q, params);
    const IkResult ik = LegInverseKinematics(leg, target, params);
    EXPECT_FALSE(ik.clamped) << q.transpose();
    EXPECT_LE((LegForwardKinematics(leg, ik.q, params) - target).norm(), 1e-6);
    EXPECT_LE((ik.q - q).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(LegKinematicsTest, WorkspaceBoundaryFullyExtended) {
  const QuadrupedParams params;
  const Eigen::Vector3d target(0.0, 0.08, -0.42);
  const IkResult ik = LegInverseKinematics(kFrontLeft, target, params);
  EXPECT_NEAR(ik.q[2], 0.0, 1e-6);
  EXPECT_LE((LegForwardKinematics(kFrontLeft, ik.q, params) - target).norm(),
            1e-6);
}

TEST(LegKinematicsTest, UnreachableReportsNearestPoint) {
  const QuadrupedParams params;
  try {
    LegInverseKinematics(kRearRight, {0.0, -0.08, -0.5}, params);
    FAIL() << "expected UnreachableError";
  } catch (const UnreachableError& e) {
    EXPECT_LE((e.nearest() - Eigen::Vector3d(0.0, -0.08, -0.42)).norm(), 1e-12);
  }
}

TEST(LegKinematicsTest, JointLimitClampFlagged) {
  QuadrupedParams params;
  params.joint_max.segment<3>(0) << 0.8, 0.2, 0.0;
  const IkResult ik =
      LegInverseKinematics(kFrontLeft, {-0.2, 0.08, -0.25}, params);
  EXPECT_TRUE(ik.clamped);
  EXPECT_EQ(ik.q[1], 0.2);
}

TEST(LegJacobianTest, MatchesFiniteDifferences) {
  const QuadrupedParams params;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const int leg = i % kNumLegs;
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    Eigen::Matrix3d fd;
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3d e = h * Eigen::Vector3d::Unit(j);
      fd.col(j) = (LegForwardKinematics(leg, q + e, params) -
                   LegForwardKinematics(leg, q - e, params)) /
                  (2.0 * h);
    }
    EXPECT_LE((LegJacobian(leg, q, params) - fd).norm() / fd.norm(), 1e-5);
  }
}

TEST(LegJacobianTest, StraightLegIsSingular) {
  const QuadrupedParams params;
  EXPECT_LT(std::abs(LegJacobian(kFrontLeft, {0.1, 0.3, 0.0}, params)
                         .determinant()),
            1e-6);
  EXPECT_GT(std::abs(LegJacobian(kFrontLeft,
                                 NominalJointAngles(kFrontLeft, 0.28, params),
                                 params)
                         .determinant()),
            1e-3);
}

TEST(LegJacobianTest, AbductionColumnTangentToCircle) {
  const QuadrupedParams params;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d q(0.0, 0.7, -1.4);
    const Eigen::Vector3d p = LegForwardKinematics(leg, q, params);
    const Eigen::Vector3d col = LegJacobian(leg, q, params).col(0);
    const Eigen::Vector3d radial(0.0, p.y(), p.z());
    EXPECT_NEAR(col.x(), 0.0, 1e-15);
    EXPECT_NEAR(col.dot(radial), 0.0, 1e-15);
    EXPECT_NEAR(col.norm(), radial.norm(), 1e-15);
  }
}

TEST(PdSwingTorqueTest, Examples) {
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-33.5);
  const Eigen::Vector3d hi = Eigen::Vector3d::Constant(33.5);
  const Eigen::Vector3d q(0.1, 0.8, -1.5);
  EXPECT_EQ(PdSwingTorque(q, q, Eigen::Vector3d::Zero(), 20, 0.5, lo, hi),
            Eigen::Vector3d::Zero());
  const Eigen::Vector3d tau = PdSwingTorque(
      q + Eigen::Vector3d(0.1, 0, 0), q, Eigen::Vector3d::Zero(), 20, 0, lo, hi);
  EXPECT_NEAR(tau[0], 2.0, 1e-12);
  const Eigen::Vector3d sat = PdSwingTorque(
      q + Eigen::Vector3d(100, -100, 0), q, Eigen::Vector3d::Zero(), 20, 0.5,
      lo, hi);
  EXPECT_EQ(sat[0], 33.5);
  EXPECT_EQ(sat[1], -33.5);
}

TEST(GaitConfigTest, SwingInertiaIsCriticallyDamped) {
  const GaitConfig config;
  // kd^2 = 4 kp I
  EXPECT_NEAR(config.kd * config.kd,
              4.0 * config.kp * config.swing_inertia(), 1e-15);
  EXPECT_NO_THROW(config.Validate());
}

}  // namespace
}  // namespace quadcrawl
