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

#include "quadcrawl/planner.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quadcrawl/distance.h"
#include "quadcrawl/scenario.h"

namespace quadcrawl {
namespace {

const TorsoPose kStart{0.0, 0.0, 0.28, 0.0};
const TorsoPose kGoal{3.0, 0.0, 0.28, 0.0};

TEST(RestToRestTimeTest, TrapezoidAndTriangleProfiles) {
  EXPECT_DOUBLE_EQ(RestToRestTime(3.0, 0.5, 1.0), 6.5);
  // Too short to reach v_max: triangle profile 2 sqrt(d / a).
  EXPECT_DOUBLE_EQ(RestToRestTime(0.16, 0.5, 1.0), 0.8);
  EXPECT_DOUBLE_EQ(RestToRestTime(0.0, 0.5, 1.0), 0.0);
}

TEST(CollocationLayoutTest, DimensionAndCounts) {
  const CollocationLayout layout(2);
  EXPECT_EQ(layout.dimension(), 37);
  EXPECT_EQ(layout.num_equalities(), 8 * 2 + 8 + 8 + 4);
  EXPECT_EQ(layout.num_collision_constraints(), 3 + 2);

  const Transcription tr = Transcribe(kStart, kGoal, Scenario::Default().world,
                                      [] {
                                        PlannerConfig c;
                                        c.knot_count = 2;
                                        return c;
                                      }());
  EXPECT_EQ(tr.problem.dimension, 37);
  EXPECT_EQ(tr.problem.num_equalities, 36);
  EXPECT_EQ(tr.problem.num_inequalities, 5);
}

TEST(TranscribeTest, RejectsCollidingEndpoints) {
  const World world = Scenario::Default().world;
  EXPECT_THROW(Transcribe({1.5, 0.0, 0.28, 0.0}, kGoal, world, {}),
               CollisionError);
  EXPECT_THROW(Transcribe(kStart, {1.28, 0.0, 0.28, 0.0}, world, {}),
               CollisionError);
}

TEST(TranscribeTest, AnalyticDerivativesMatchNumeric) {
  PlannerConfig config;
  config.knot_count = 6;
  const World world = Scenario::Default().world;
  for (PlanMode mode : {PlanMode::k3d, PlanMode::k2d}) {
    const Transcription tr = Transcribe(kStart, kGoal, world, config, mode);
    const nlp::NlpProblem& p = tr.problem;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd z(p.dimension);
      for (int i = 0; i < p.dimension; ++i) {
        z[i] = p.variable_lower[i] +
               u(rng) * (p.variable_upper[i] - p.variable_lower[i]);
      }
      z[0] = 2.0 + 6.0 * u(rng);
      // Put the positions near the table so the distance term is active.
      for (int k = 0; k <= config.knot_count; ++k) {
        const int s = tr.layout.state_index(k);
        z[s] = 1.0 + u(rng);
        z[s + 1] = -0.6 + 1.2 * u(rng);
      }
      const auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return (a - b).cwiseAbs().maxCoeff() /
               std::max(1.0, b.cwiseAbs().maxCoeff());
      };
      const Eigen::VectorXd g = p.objective_gradient(z);
      EXPECT_LE(rel(g, nlp::NumericGradient(p.objective, z, 1e-6)), 1e-4);
      const Eigen::MatrixXd je = Eigen::MatrixXd(p.equality_jacobian(z));
      EXPECT_LE(rel(je, nlp::NumericJacobian(p.equality_constraints, z, 1e-6)),
                1e-4);
      const Eigen::MatrixXd ji = Eigen::MatrixXd(p.inequality_jacobian(z));
      EXPECT_LE(
          rel(ji, nlp::NumericJacobian(p.inequality_constraints, z, 1e-6)),
          1e-4);
    }
  }
}

TEST(PlanTest, OneDimensionalTransferMatchesTrapezoidProfile) {
  const auto begin = std::chrono::steady_clock::now();
  const PlanReport report = Plan(kStart, kGoal, World::Default(), {});
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - begin)
                             .count();
  ASSERT_TRUE(report.converged());
  EXPECT_NEAR(report.trajectory.total_time, 6.5, 0.02 * 6.5);
  EXPECT_GE(report.trajectory.total_time,
            MinimumTimeLowerBound(kStart, kGoal, World::Default()) - 1e-6);
  EXPECT_LE(report.max_dynamics_defect, 1e-5);
  EXPECT_LE(seconds, 10.0);
}

TEST(PlanTest, StartEqualsGoalIsTrivial) {
  PlannerConfig config;
  const PlanReport report =
      Plan(kStart, kStart, Scenario::Default().world, config);
  ASSERT_TRUE(report.converged());
  EXPECT_EQ(report.trajectory.total_time, config.time_lower);
  for (const TrajectoryKnot& knot : report.trajectory.knots) {
    EXPECT_EQ(knot.command.accel, Eigen::Vector4d::Zero());
    EXPECT_EQ(knot.state.twist, Eigen::Vector4d::Zero());
  }
}

TEST(PlanTest, LargerCommandBoundsNeverSlower) {
  PlannerConfig config;
  // Fine enough to resolve the 0.125 s ramps of the largest bound.
  config.knot_count = 100;
  double previous = 1e9;
  for (double a_max : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    World world = World::Default();
    world.command_lower.setConstant(-a_max);
    world.command_upper.setConstant(a_max);
    const PlanReport report = Plan(kStart, kGoal, world, config);
    ASSERT_TRUE(report.converged()) << a_max;
    EXPECT_LE(report.trajectory.total_time, previous + 1e-4) << a_max;
    EXPECT_NEAR(report.trajectory.total_time, RestToRestTime(3.0, 0.5, a_max),
                0.02 * RestToRestTime(3.0, 0.5, a_max));
    previous = report.trajectory.total_time;
  }
}

TEST(PlanTest, TwoDimensionalMatchesWithoutObstacles) {
  const World world = World::Default();
  const TorsoPose goal{2.0, 1.0, 0.28, 0.3};
  const PlanReport p3 = Plan(kStart, goal, world, {});
  const PlanReport p2 = Plan2d(kStart, goal, world, {});
  ASSERT_TRUE(p3.converged());
  ASSERT_TRUE(p2.converged());
  EXPECT_NEAR(p2.trajectory.total_time, p3.trajectory.total_time,
              0.01 * p3.trajectory.total_time);
}

class TableScenarioTest : public ::testing::Test {
 protected:
  Scenario scenario_ = Scenario::Default();
};

TEST_F(TableScenarioTest, CrawlsUnderTheTable) {
  const PlanReport report =
      Plan(scenario_.start, scenario_.goal, scenario_.world, scenario_.planner);
  ASSERT_TRUE(report.converged());
  double min_z = 1.0;
  for (const TrajectoryKnot& knot : report.trajectory.knots) {
    const TorsoPose& p = knot.state.pose;
    if (std::abs(p.x - 1.5) <= 0.2) min_z = std::min(min_z, p.z);
  }
  EXPECT_LE(min_z, 0.23 - scenario_.world.clearance);

  const TrajectoryAudit audit =
      AuditTrajectory(report.trajectory, scenario_.world);
  EXPECT_LE(audit.endpoint_error, 1e-3);
  EXPECT_GE(audit.min_clearance, scenario_.world.clearance - 5e-3);
  EXPECT_LE(audit.max_dynamics_defect, 1e-5);
  EXPECT_GE(report.min_clearance, scenario_.world.clearance - 1e-4);

  // Bounds and exact endpoints.
  const World& w = scenario_.world;
  for (const TrajectoryKnot& knot : report.trajectory.knots) {
    const Vector8d x = knot.state.Flatten();
    EXPECT_TRUE(((x - w.state_lower).array() >= -1e-9).all());
    EXPECT_TRUE(((w.state_upper - x).array() >= -1e-9).all());
    EXPECT_TRUE(((knot.command.accel - w.command_lower).array() >= -1e-9).all());
    EXPECT_TRUE(((w.command_upper - knot.command.accel).array() >= -1e-9).all());
  }
  const TorsoState& last = report.trajectory.knots.back().state;
  EXPECT_LE((last.pose.AsVector() - scenario_.goal.AsVector())
                .cwiseAbs()
                .maxCoeff(),
            scenario_.planner.solver.tol_feas);
  EXPECT_LE(last.twist.cwiseAbs().maxCoeff(), scenario_.planner.solver.tol_feas);
}

TEST_F(TableScenarioTest, TwoDimensionalPlanGoesAround) {
  const PlanReport report = Plan2d(scenario_.start, scenario_.goal,
                                   scenario_.world, scenario_.planner);
  ASSERT_TRUE(report.converged());
  double max_abs_y = 0.0;
  for (const TrajectoryKnot& knot : report.trajectory.knots) {
    EXPECT_DOUBLE_EQ(knot.state.pose.z, scenario_.start.z);
    max_abs_y = std::max(max_abs_y, std::abs(knot.state.pose.y));
  }
  EXPECT_GE(max_abs_y, 0.5 + scenario_.world.clearance - 1e-3);
  const TrajectoryAudit audit =
      AuditTrajectory(report.trajectory, scenario_.world);
  EXPECT_LE(audit.endpoint_error, 1e-3);
  EXPECT_GE(audit.min_clearance, scenario_.world.clearance - 5e-3);
}

TEST(HermiteStateTest, ReproducesKnots) {
  const PlanReport report = Plan(kStart, kGoal, World::Default(), [] {
    PlannerConfig c;
    c.knot_count = 20;
    return c;
  }());
  ASSERT_TRUE(report.converged());
  for (const TrajectoryKnot& knot : report.trajectory.knots) {
    const TorsoState s = HermiteState(report.trajectory, knot.time);
    EXPECT_LE((s.Flatten() - knot.state.Flatten()).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(PlanTest, DeterministicAcrossRuns) {
  const Scenario s = Scenario::Default();
  const PlanReport a = Plan({0.2, 0.4, 0.28, 0.1}, s.goal, s.world, s.planner);
  const PlanReport b = Plan({0.2, 0.4, 0.28, 0.1}, s.goal, s.world, s.planner);
  ASSERT_EQ(a.trajectory.knots.size(), b.trajectory.knots.size());
  EXPECT_EQ(a.trajectory.total_time, b.trajectory.total_time);
  for (size_t k = 0; k < a.trajectory.knots.size(); ++k) {
    EXPECT_EQ(a.trajectory.knots[k].state.Flatten(),
              b.trajectory.knots[k].state.Flatten());
  }
}

}  // namespace
}  // namespace quadcrawl
