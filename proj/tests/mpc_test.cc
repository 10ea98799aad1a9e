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
#include <random>

#include <Eigen/Geometry>

#include <gtest/gtest.h>

#include "quadcrawl/gait.h"
#include "quadcrawl/simulator.h"

namespace quadcrawl {
namespace {

using Feet = std::array<Eigen::Vector3d, kNumLegs>;
using StanceFlags = std::array<bool, kNumLegs>;

SrbState Standing() {
  SrbState s;
  s.position = {0.0, 0.0, 0.28};
  return s;
}

Feet SymmetricFeet() {
  const QuadrupedParams params;
  Feet feet;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    feet[leg] = params.hip_offsets[leg] +
                Eigen::Vector3d(0.0, LegSide(leg) * params.link_lengths[0], 0.0);
    feet[leg].z() = 0.0;
  }
  return feet;
}

std::vector<StanceFlags> AllStance(int horizon) {
  return std::vector<StanceFlags>(horizon, StanceFlags{true, true, true, true});
}

TEST(FrictionPyramidTest, Examples) {
  for (double mu : {0.1, 0.6, 2.0}) {
    EXPECT_EQ(PyramidViolation({0.0, 0.0, 10.0}, mu), 0.0);
  }
  const double bound = 0.6 / std::sqrt(2.0) * 10.0;
  EXPECT_NEAR(bound, 4.2426, 1e-4);
  EXPECT_EQ(PyramidViolation({bound - 1e-9, 0.0, 10.0}, 0.6), 0.0);
  EXPECT_GT(PyramidViolation({bound + 1e-6, 0.0, 10.0}, 0.6), 0.0);
  EXPECT_GT(PyramidViolation({0.0, 0.0, -1.0}, 0.6), 0.0);
  EXPECT_THROW(FrictionPyramid(0.0), std::invalid_argument);
}

TEST(FrictionPyramidTest, InscribedInCone) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20.0, 20.0), uz(0.0, 20.0),
      umu(0.05, 1.5);
  int feasible = 0;
  for (int i = 0; i < 20000; ++i) {
    const double mu = umu(rng);
    const Eigen::Vector3d f(u(rng), u(rng), uz(rng));
    if ((FrictionPyramid(mu) * f).minCoeff() < 0.0) continue;
    ++feasible;
    EXPECT_GE(mu * f.z() + 1e-12, f.head<2>().norm());
  }
  EXPECT_GT(feasible, 1000);
}

TEST(SolveGrfMpcTest, StaticsSharesWeightEqually) {
  const QuadrupedParams params;
  const MpcConfig config;
  const SrbState current = Standing();
  const std::vector<SrbState> ref(config.horizon, current);
  const MpcSolution sol = SolveGrfMpc(current, ref, AllStance(config.horizon),
                                      SymmetricFeet(), params, config);
  const GroundReactionForce& first = sol.forces.front();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    EXPECT_NEAR(first.force[leg].z(), 12.0 * 9.81 / 4.0, 1e-3) << leg;
    EXPECT_NEAR(first.force[leg].x(), 0.0, 1e-3);
    EXPECT_NEAR(first.force[leg].y(), 0.0, 1e-3);
    EXPECT_LE(PyramidViolation(first.force[leg], params.mu), 1e-8);
  }
  EXPECT_NEAR(first.Total().z(), 117.72, 1e-3);
}

TEST(SolveGrfMpcTest, SingleFootUnderCom) {
  const QuadrupedParams params;
  const MpcConfig config;
  const SrbState current = Standing();
  Feet feet = SymmetricFeet();
  feet[kFrontLeft] = {0.0, 0.0, 0.0};
  const std::vector<StanceFlags> stance(config.horizon,
                                        StanceFlags{true, false, false, false});
  const MpcSolution sol =
      SolveGrfMpc(current, std::vector<SrbState>(config.horizon, current),
                  stance, feet, params, config);
  const GroundReactionForce& first = sol.forces.front();
  EXPECT_LE((first.force[kFrontLeft] - Eigen::Vector3d(0, 0, params.weight()))
                .cwiseAbs()
                .maxCoeff(),
            1e-3);
  for (int leg : {kFrontRight, kRearLeft, kRearRight}) {
    EXPECT_EQ(first.force[leg], Eigen::Vector3d::Zero());
    EXPECT_FALSE(first.stance[leg]);
  }
}

TEST(SolveGrfMpcTest, ForwardAccelerationObeysNewton) {
  const QuadrupedParams params;
  const MpcConfig config;
  const SrbState current = Standing();
  const std::vector<SrbState> ref =
      BuildReference(Eigen::Vector4d(0.5, 0.0, 0.0, 0.0), current, config);
  const MpcSolution sol = SolveGrfMpc(current, ref, AllStance(config.horizon),
                                      SymmetricFeet(), params, config);
  const GroundReactionForce& first = sol.forces.front();
  const double accel =
      (sol.predicted.front().velocity.x() - current.velocity.x()) / config.step;
  EXPECT_GT(accel, 0.0);
  EXPECT_NEAR(first.Total().x(), params.mass * accel, 1e-6);
  const double bound = params.mu / std::sqrt(2.0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    EXPECT_LE(std::abs(first.force[leg].x()),
              bound * first.force[leg].z() + 1e-9);
  }
}

TEST(SolveGrfMpcTest, AllForcesFeasibleAndFirstStepImprovesTracking) {
  const QuadrupedParams params;
  const MpcConfig config;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GaitSchedule gait;
  for (int trial = 0; trial < 30; ++trial) {
    SrbState current = Standing();
    current.velocity = {0.3 * u(rng), 0.3 * u(rng), 0.05 * u(rng)};
    current.yaw = u(rng);
    current.yaw_rate = 0.5 * u(rng);
    const Eigen::Vector4d v(0.5 * u(rng), 0.5 * u(rng), 0.1 * u(rng), u(rng));
    const std::vector<SrbState> ref = BuildReference(v, current, config);
    std::vector<StanceFlags> stance;
    const double t0 = 0.6 * (u(rng) + 1.0);
    for (int j = 0; j < config.horizon; ++j) {
      const auto phase = GaitPhase(t0 + j * config.step, gait);
      StanceFlags flags;
      for (int leg = 0; leg < kNumLegs; ++leg) flags[leg] = phase[leg].stance;
      stance.push_back(flags);
    }
    const Feet feet = SymmetricFeet();
    const MpcSolution sol =
        SolveGrfMpc(current, ref, stance, feet, params, config);
    for (int j = 0; j < config.horizon; ++j) {
      for (int leg = 0; leg < kNumLegs; ++leg) {
        const Eigen::Vector3d& f = sol.forces[j].force[leg];
        if (!stance[j][leg]) {
          EXPECT_EQ(f, Eigen::Vector3d::Zero());
          continue;
        }
        EXPECT_LE(PyramidViolation(f, params.mu), 1e-6);
        EXPECT_GE(f.z(), -1e-9);
        EXPECT_LE(f.z(), config.max_force_factor * params.weight() + 1e-6);
      }
    }
    // One-step tracking cost under the executed force versus no force.
    const Vector8d w = config.state_weights;
    const auto cost = [&](const SrbState& s) {
      const Vector8d e = s.Flatten() - ref.front().Flatten();
      return e.dot(w.asDiagonal() * e);
    };
    GroundReactionForce none;
    none.stance = sol.forces.front().stance;
    EXPECT_LT(cost(PropagateSrb(current, sol.forces.front(), feet, params,
                                config.step)),
              cost(PropagateSrb(current, none, feet, params, config.step)));
  }
}

TEST(SolveGrfMpcTest, Deterministic) {
  const QuadrupedParams params;
  const MpcConfig config;
  SrbState current = Standing();
  current.velocity.x() = 0.2;
  const auto ref =
      BuildReference(Eigen::Vector4d(0.4, 0.1, -0.05, 0.2), current, config);
  const MpcSolution a = SolveGrfMpc(current, ref, AllStance(config.horizon),
                                    SymmetricFeet(), params, config);
  const MpcSolution b = SolveGrfMpc(current, ref, AllStance(config.horizon),
                                    SymmetricFeet(), params, config);
  for (int j = 0; j < config.horizon; ++j) {
    EXPECT_EQ(a.forces[j].Flatten(), b.forces[j].Flatten());
  }
  EXPECT_EQ(a.cost, b.cost);
}

TEST(SolveGrfMpcTest, Errors) {
  const QuadrupedParams params;
  const MpcConfig config;
  const SrbState current = Standing();
  const std::vector<SrbState> ref(config.horizon, current);
  std::vector<StanceFlags> stance = AllStance(config.horizon);
  stance[3] = StanceFlags{false, false, false, false};
  EXPECT_THROW(SolveGrfMpc(current, ref, stance, SymmetricFeet(), params, config),
               MpcError);
  SrbState bad = current;
  bad.position.x() = NAN;
  EXPECT_THROW(SolveGrfMpc(bad, ref, AllStance(config.horizon), SymmetricFeet(),
                           params, config),
               std::invalid_argument);
}

TEST(BuildReferenceTest, Examples) {
  const MpcConfig config;
  SrbState current = Standing();
  current.yaw = 0.3;
  for (const SrbState& s :
       BuildReference(Eigen::Vector4d::Zero(), current, config)) {
    EXPECT_EQ(s.position, current.position);
    EXPECT_EQ(s.yaw, current.yaw);
  }
  const auto forward =
      BuildReference(Eigen::Vector4d(0.5, 0.0, 0.0, 0.0), Standing(), config);
  ASSERT_EQ(forward.size(), 10u);
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(forward[k].position.x(), 0.025 * (k + 1), 1e-15);
    EXPECT_EQ(forward[k].velocity, Eigen::Vector3d(0.5, 0.0, 0.0));
  }
  EXPECT_NEAR(forward.back().position.x(), 0.25, 1e-15);
  const auto turn =
      BuildReference(Eigen::Vector4d(0.0, 0.0, 0.0, 0.4), current, config);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(turn[k].position, current.position);
    EXPECT_NEAR(turn[k].yaw, 0.3 + 0.02 * (k + 1), 1e-15);
  }
}

TEST(GrfToTorquesTest, IdentityJacobianSignConvention) {
  EXPECT_EQ(LegTorqueFromForce(Eigen::Matrix3d::Identity(), {0.0, 0.0, 10.0}),
            Eigen::Vector3d(0.0, 0.0, -10.0));
}

TEST(GrfToTorquesTest, ZeroForceZeroTorque) {
  const QuadrupedParams params;
  LegJointState legs;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    legs.q.segment<3>(3 * leg) = NominalJointAngles(leg, 0.28, params);
  }
  EXPECT_EQ(GrfToTorques(GroundReactionForce{}, legs, 0.2, params),
            Vector12d::Zero());
}

TEST(GrfToTorquesTest, VirtualWorkBalance) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < 100; ++i) {
    Eigen::Matrix3d jac;
    for (int k = 0; k < 9; ++k) jac.data()[k] = gauss(rng);
    if (std::abs(jac.determinant()) < 1e-3) continue;
    const Eigen::Vector3d f(gauss(rng), gauss(rng), gauss(rng));
    const Eigen::Vector3d qdot(gauss(rng), gauss(rng), gauss(rng));
    const Eigen::Vector3d tau = LegTorqueFromForce(jac, f);
    EXPECT_NEAR(f.dot(jac * qdot), -tau.dot(qdot), 1e-9);
  }
}

TEST(GrfToTorquesTest, MatchesBodyFrameJacobianAndClamps) {
  const QuadrupedParams params;
  LegJointState legs;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    legs.q.segment<3>(3 * leg) = NominalJointAngles(leg, 0.28, params);
  }
  GroundReactionForce grf;
  grf.stance = {true, false, true, false};
  grf.force[kFrontLeft] = {3.0, -1.0, 40.0};
  grf.force[kRearLeft] = {0.0, 0.0, 1e4};
  grf.force[kFrontRight] = {1.0, 1.0, 1.0};  // swing: ignored
  const double yaw = 0.7;
  const Vector12d tau = GrfToTorques(grf, legs, yaw, params);
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Vector3d expected =
      -LegJacobian(kFrontLeft, legs.leg_q(kFrontLeft), params).transpose() *
      (rot.transpose() * grf.force[kFrontLeft]);
  EXPECT_LE((tau.head<3>() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(tau.segment<3>(3), Eigen::Vector3d::Zero());
  EXPECT_TRUE(((tau - params.torque_min).array() >= 0.0).all());
  EXPECT_TRUE(((params.torque_max - tau).array() >= 0.0).all());
  EXPECT_EQ(tau.segment<3>(6).cwiseAbs().maxCoeff(), 33.5);
}

TEST(GrfToTorquesTest, SingularLegNamed) {
  const QuadrupedParams params;
  LegJointState legs;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    legs.q.segment<3>(3 * leg) = NominalJointAngles(leg, 0.28, params);
  }
  legs.q.segment<3>(3 * kRearRight) = Eigen::Vector3d::Zero();  // straight leg
  GroundReactionForce grf;
  try {
    GrfToTorques(grf, legs, 0.0, params);
    FAIL() << "expected a singularity error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("RR"), std::string::npos) << e.what();
  }
}

TEST(PropagateSrbTest, FreeFall) {
  const QuadrupedParams params;
  GroundReactionForce none;
  none.stance = {false, false, false, false};
  const SrbState next =
      PropagateSrb(Standing(), none, SymmetricFeet(), params, 0.01);
  EXPECT_NEAR(next.velocity.z(), -params.gravity * 0.01, 1e-15);
  EXPECT_NEAR(next.position.z(), 0.28 - 0.5 * params.gravity * 1e-4, 1e-15);
}

}  // namespace
}  // namespace quadcrawl
