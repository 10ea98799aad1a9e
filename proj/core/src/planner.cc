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
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include <Eigen/SparseCore>

#include "quadcrawl/distance.h"

namespace quadcrawl {
namespace {

using Triplet = Eigen::Triplet<double>;

constexpr const char* kAxisNames[8] = {"x",  "y",  "z",  "yaw",
                                       "vx", "vy", "vz", "yaw_rate"};

void CheckWithinBounds(const Vector8d& state, const World& world,
                       const char* which) {
  for (int i = 0; i < 8; ++i) {
    if (state[i] < world.state_lower[i] || state[i] > world.state_upper[i]) {
      std::ostringstream msg;
      msg << which << " " << kAxisNames[i] << " = " << state[i]
          << " is outside the state bounds [" << world.state_lower[i] << ", "
          << world.state_upper[i] << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

void CheckClearance(const TorsoPose& pose, const World& world,
                    const char* which) {
  const double d = SignedDistance(pose.Position(), world);
  if (d < world.clearance) {
    std::ostringstream msg;
    msg << which << " pose (" << pose.x << ", " << pose.y << ", " << pose.z
        << ") has clearance " << d << " < " << world.clearance;
    throw CollisionError(msg.str());
  }
}

// Collocation problem callbacks. Holds copies of everything it needs so the
// NlpProblem stays valid after Transcribe returns.
struct CollocationModel {
  CollocationLayout layout;
  World world;
  PlannerConfig config;
  Vector8d start_state;
  Vector8d goal_state;

  double Interval(const Eigen::VectorXd& z) const {
    return z[layout.time_index()] / layout.num_intervals();
  }

  // Trapezoid quadrature weight of knot k.
  double EffortWeight(int k) const {
    return (k == 0 || k == layout.num_intervals()) ? 0.5 : 1.0;
  }

  double Objective(const Eigen::VectorXd& z) const {
    double effort = 0.0;
    for (int k = 0; k < layout.num_knots(); ++k) {
      effort += EffortWeight(k) *
                z.segment<4>(layout.command_index(k)).squaredNorm();
    }
    return z[layout.time_index()] +
           config.effort_weight * Interval(z) * effort;
  }

  Eigen::VectorXd ObjectiveGradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(z.size());
    const double h = Interval(z);
    double effort = 0.0;
    for (int k = 0; k < layout.num_knots(); ++k) {
      const int iu = layout.command_index(k);
      effort += EffortWeight(k) * z.segment<4>(iu).squaredNorm();
      grad.segment<4>(iu) =
          2.0 * config.effort_weight * h * EffortWeight(k) * z.segment<4>(iu);
    }
    grad[layout.time_index()] =
        1.0 + config.effort_weight * effort / layout.num_intervals();
    return grad;
  }

  Eigen::VectorXd Equalities(const Eigen::VectorXd& z) const {
    const int n = layout.num_intervals();
    const double h = Interval(z);
    Eigen::VectorXd out(layout.num_equalities());
    for (int k = 0; k < n; ++k) {
      const auto x0 = z.segment<8>(layout.state_index(k));
      const auto x1 = z.segment<8>(layout.state_index(k + 1));
      const auto u0 = z.segment<4>(layout.command_index(k));
      const auto u1 = z.segment<4>(layout.command_index(k + 1));
      out.segment<4>(8 * k) =
          x1.head<4>() - x0.head<4>() - 0.5 * h * (x0.tail<4>() + x1.tail<4>());
      out.segment<4>(8 * k + 4) =
          x1.tail<4>() - x0.tail<4>() - 0.5 * h * (u0 + u1);
    }
    int row = 8 * n;
    out.segment<8>(row) = z.segment<8>(layout.state_index(0)) - start_state;
    row += 8;
    out.segment<8>(row) = z.segment<8>(layout.state_index(n)) - goal_state;
    row += 8;
    out.segment<4>(row) = z.segment<4>(layout.command_index(n));
    return out;
  }

  nlp::SparseMatrix EqualityJacobian(const Eigen::VectorXd& z) const {
    const int n = layout.num_intervals();
    const double h = Interval(z);
    const int it = layout.time_index();
    std::vector<Triplet> triplets;
    triplets.reserve(8 * n * 5 + 20);
    for (int k = 0; k < n; ++k) {
      const int ix0 = layout.state_index(k);
      const int ix1 = layout.state_index(k + 1);
      const int iu0 = layout.command_index(k);
      const int iu1 = layout.command_index(k + 1);
      for (int i = 0; i < 4; ++i) {
        const int rp = 8 * k + i;
        triplets.emplace_back(rp, ix1 + i, 1.0);
        triplets.emplace_back(rp, ix0 + i, -1.0);
        triplets.emplace_back(rp, ix0 + 4 + i, -0.5 * h);
        triplets.emplace_back(rp, ix1 + 4 + i, -0.5 * h);
        triplets.emplace_back(rp, it,
                              -0.5 / n * (z[ix0 + 4 + i] + z[ix1 + 4 + i]));
        const int rv = 8 * k + 4 + i;
        triplets.emplace_back(rv, ix1 + 4 + i, 1.0);
        triplets.emplace_back(rv, ix0 + 4 + i, -1.0);
        triplets.emplace_back(rv, iu0 + i, -0.5 * h);
        triplets.emplace_back(rv, iu1 + i, -0.5 * h);
        triplets.emplace_back(rv, it, -0.5 / n * (z[iu0 + i] + z[iu1 + i]));
      }
    }
    int row = 8 * n;
    for (int i = 0; i < 8; ++i) {
      triplets.emplace_back(row + i, layout.state_index(0) + i, 1.0);
    }
    row += 8;
    for (int i = 0; i < 8; ++i) {
      triplets.emplace_back(row + i, layout.state_index(n) + i, 1.0);
    }
    row += 8;
    for (int i = 0; i < 4; ++i) {
      triplets.emplace_back(row + i, layout.command_index(n) + i, 1.0);
    }
    nlp::SparseMatrix jac(layout.num_equalities(), layout.dimension());
    jac.setFromTriplets(triplets.begin(), triplets.end());
    return jac;
  }

  // Hermite midpoint of interval k.
  Eigen::Vector3d Midpoint(const Eigen::VectorXd& z, int k) const {
    const auto x0 = z.segment<8>(layout.state_index(k));
    const auto x1 = z.segment<8>(layout.state_index(k + 1));
    return 0.5 * (x0.head<3>() + x1.head<3>()) +
           Interval(z) / 8.0 * (x0.segment<3>(4) - x1.segment<3>(4));
  }

  double RequiredClearance() const {
    return world.clearance + config.clearance_margin;
  }

  Eigen::VectorXd Inequalities(const Eigen::VectorXd& z) const {
    const int n = layout.num_intervals();
    Eigen::VectorXd out(layout.num_collision_constraints());
    for (int k = 0; k <= n; ++k) {
      const Eigen::Vector3d p = z.segment<3>(layout.state_index(k));
      out[k] = SmoothSignedDistance(p, world, config.smoothing).value -
               RequiredClearance();
    }
    for (int k = 0; k < n; ++k) {
      out[n + 1 + k] =
          SmoothSignedDistance(Midpoint(z, k), world, config.smoothing).value -
          RequiredClearance();
    }
    return out;
  }

  nlp::SparseMatrix InequalityJacobian(const Eigen::VectorXd& z) const {
    const int n = layout.num_intervals();
    const double h = Interval(z);
    std::vector<Triplet> triplets;
    triplets.reserve(3 * (n + 1) + 13 * n);
    for (int k = 0; k <= n; ++k) {
      const Eigen::Vector3d p = z.segment<3>(layout.state_index(k));
      const Eigen::Vector3d grad =
          SmoothSignedDistance(p, world, config.smoothing).gradient;
      for (int i = 0; i < 3; ++i) {
        triplets.emplace_back(k, layout.state_index(k) + i, grad[i]);
      }
    }
    for (int k = 0; k < n; ++k) {
      const int row = n + 1 + k;
      const int ix0 = layout.state_index(k);
      const int ix1 = layout.state_index(k + 1);
      const Eigen::Vector3d grad =
          SmoothSignedDistance(Midpoint(z, k), world, config.smoothing)
              .gradient;
      const Eigen::Vector3d dv = z.segment<3>(ix0 + 4) - z.segment<3>(ix1 + 4);
      for (int i = 0; i < 3; ++i) {
        triplets.emplace_back(row, ix0 + i, 0.5 * grad[i]);
        triplets.emplace_back(row, ix1 + i, 0.5 * grad[i]);
        triplets.emplace_back(row, ix0 + 4 + i, h / 8.0 * grad[i]);
        triplets.emplace_back(row, ix1 + 4 + i, -h / 8.0 * grad[i]);
      }
      triplets.emplace_back(row, layout.time_index(),
                            grad.dot(dv) / (8.0 * n));
    }
    nlp::SparseMatrix jac(layout.num_collision_constraints(),
                          layout.dimension());
    jac.setFromTriplets(triplets.begin(), triplets.end());
    return jac;
  }

  nlp::SparseMatrix LagrangianHessian(const Eigen::VectorXd& z,
                                      const Eigen::VectorXd& lambda,
                                      const Eigen::VectorXd& mu) const {
    const int n = layout.num_intervals();
    const int it = layout.time_index();
    const double h = Interval(z);
    std::vector<Triplet> triplets;
    auto add_symmetric = [&triplets](int a, int b, double v) {
      triplets.emplace_back(a, b, v);
      if (a != b) triplets.emplace_back(b, a, v);
    };

    for (int k = 0; k <= n; ++k) {
      const int iu = layout.command_index(k);
      const double c = 2.0 * config.effort_weight * EffortWeight(k);
      for (int i = 0; i < 4; ++i) {
        add_symmetric(it, iu + i, c * z[iu + i] / n);
        triplets.emplace_back(iu + i, iu + i, c * h);
      }
    }

    // The defects are bilinear in T and the velocities / commands.
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < 4; ++i) {
        const double lp = -0.5 / n * lambda[8 * k + i];
        add_symmetric(it, layout.state_index(k) + 4 + i, lp);
        add_symmetric(it, layout.state_index(k + 1) + 4 + i, lp);
        const double lv = -0.5 / n * lambda[8 * k + 4 + i];
        add_symmetric(it, layout.command_index(k) + i, lv);
        add_symmetric(it, layout.command_index(k + 1) + i, lv);
      }
    }

    if (mu.size() > 0) {
      for (int k = 0; k <= n; ++k) {
        if (mu[k] == 0.0) continue;
        const Eigen::Vector3d p = z.segment<3>(layout.state_index(k));
        const Eigen::Matrix3d hs =
            -mu[k] * SmoothSignedDistanceHessian(p, world, config.smoothing);
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            triplets.emplace_back(layout.state_index(k) + a,
                                  layout.state_index(k) + b, hs(a, b));
          }
        }
      }
      for (int k = 0; k < n; ++k) {
        const double weight = mu[n + 1 + k];
        if (weight == 0.0) continue;
        const int ix0 = layout.state_index(k);
        const int ix1 = layout.state_index(k + 1);
        // Midpoint Jacobian over [T, p0, p1, v0, v1].
        int index[13];
        Eigen::Matrix<double, 3, 13> jp = Eigen::Matrix<double, 3, 13>::Zero();
        index[0] = it;
        jp.col(0) = (z.segment<3>(ix0 + 4) - z.segment<3>(ix1 + 4)) / (8.0 * n);
        for (int i = 0; i < 3; ++i) {
          index[1 + i] = ix0 + i;
          index[4 + i] = ix1 + i;
          index[7 + i] = ix0 + 4 + i;
          index[10 + i] = ix1 + 4 + i;
          jp(i, 1 + i) = 0.5;
          jp(i, 4 + i) = 0.5;
          jp(i, 7 + i) = h / 8.0;
          jp(i, 10 + i) = -h / 8.0;
        }
        const Eigen::Vector3d pm = Midpoint(z, k);
        const DistanceAndGradient d =
            SmoothSignedDistance(pm, world, config.smoothing);
        Eigen::Matrix<double, 13, 13> block =
            jp.transpose() *
            SmoothSignedDistanceHessian(pm, world, config.smoothing) * jp;
        for (int i = 0; i < 3; ++i) {
          block(0, 7 + i) += d.gradient[i] / (8.0 * n);
          block(7 + i, 0) += d.gradient[i] / (8.0 * n);
          block(0, 10 + i) -= d.gradient[i] / (8.0 * n);
          block(10 + i, 0) -= d.gradient[i] / (8.0 * n);
        }
        block *= -weight;
        for (int a = 0; a < 13; ++a) {
          for (int b = 0; b < 13; ++b) {
            triplets.emplace_back(index[a], index[b], block(a, b));
          }
        }
      }
    }

    nlp::SparseMatrix hess(layout.dimension(), layout.dimension());
    hess.setFromTriplets(triplets.begin(), triplets.end());
    return hess;
  }
};

Eigen::Vector4d KnotPosition(const TorsoTrajectory& traj, int k) {
  return traj.knots[k].state.pose.AsVector();
}

// Position of knot k+1 with yaw unwrapped to be continuous with knot k.
Eigen::Vector4d UnwrappedNext(const TorsoTrajectory& traj, int k) {
  Eigen::Vector4d p1 = KnotPosition(traj, k + 1);
  const double yaw0 = traj.knots[k].state.pose.yaw;
  p1[3] = yaw0 + NormalizeYaw(p1[3] - yaw0);
  return p1;
}

// Lateral offsets that move the straight-line guess around the obstacles in
// the plane: every colliding knot is shifted along the path normal (the side
// needing the smaller shift wins), and the shifts are spread over
// neighboring knots so the guess stays smooth.
std::vector<double> LateralDetour(const std::vector<Eigen::Vector3d>& points,
                                  const Eigen::Vector2d& normal,
                                  const World& world, double required,
                                  double* side) {
  constexpr double kShiftStep = 0.01;
  constexpr double kMaxShift = 20.0;
  const int count = static_cast<int>(points.size());
  std::vector<double> best;
  double best_cost = kMaxShift;
  *side = 1.0;
  for (double sign : {1.0, -1.0}) {
    std::vector<double> shift(count, 0.0);
    double cost = 0.0;
    for (int k = 0; k < count; ++k) {
      Eigen::Vector3d p = points[k];
      while (shift[k] < kMaxShift && SignedDistance(p, world) < required) {
        shift[k] += kShiftStep;
        p.head<2>() = points[k].head<2>() + sign * shift[k] * normal;
      }
      cost = std::max(cost, shift[k]);
    }
    if (best.empty() || cost < best_cost) {
      best = shift;
      best_cost = cost;
      *side = sign;
    }
  }
  const int width = std::max(1, count / 4);
  std::vector<double> spread(count, 0.0);
  for (int j = 0; j < count; ++j) {
    if (best[j] == 0.0) continue;
    for (int k = std::max(0, j - width); k < std::min(count, j + width + 1);
         ++k) {
      const double taper = 1.0 - static_cast<double>(std::abs(k - j)) / width;
      spread[k] = std::max(spread[k], best[j] * std::max(taper, 0.0));
    }
  }
  // Endpoints stay put; they are clear by precondition.
  spread.front() = 0.0;
  spread.back() = 0.0;
  return spread;
}

PlanReport TrivialReport(const TorsoPose& pose, const PlannerConfig& config) {
  PlanReport report;
  TrajectoryKnot knot;
  knot.state.pose = pose;
  knot.state.pose.yaw = NormalizeYaw(pose.yaw);
  report.trajectory.total_time = config.time_lower;
  report.trajectory.knots = {knot, knot};
  report.trajectory.knots[1].time = config.time_lower;
  report.solver_status = nlp::NlpStatus::kConverged;
  return report;
}

}  // namespace

void PlannerConfig::Validate() const {
  if (knot_count < 2) {
    throw std::invalid_argument("planner: knot_count must be >= 2");
  }
  if (!(time_lower > 0.0 && time_lower < time_upper)) {
    throw std::invalid_argument(
        "planner: need 0 < time_lower < time_upper");
  }
  if (!(effort_weight >= 0.0)) {
    throw std::invalid_argument("planner: effort_weight must be >= 0");
  }
  if (!(smoothing > 0.0)) {
    throw std::invalid_argument("planner: smoothing must be > 0");
  }
  if (!(clearance_margin >= 0.0)) {
    throw std::invalid_argument("planner: clearance_margin must be >= 0");
  }
}

Transcription Transcribe(const TorsoPose& start, const TorsoPose& goal,
                         const World& world, const PlannerConfig& config,
                         PlanMode mode) {
  config.Validate();
  world.Validate();
  if (!start.Position().allFinite() || !goal.Position().allFinite() ||
      !std::isfinite(start.yaw) || !std::isfinite(goal.yaw)) {
    throw std::invalid_argument("planner: non-finite start or goal");
  }
  CheckClearance(start, world, "start");
  CheckClearance(goal, world, "goal");

  const int n = config.knot_count;
  CollocationLayout layout(n);

  Vector8d start_state = Vector8d::Zero();
  start_state.head<4>() = start.AsVector();
  start_state[3] = NormalizeYaw(start.yaw);
  Vector8d goal_state = Vector8d::Zero();
  goal_state.head<4>() = goal.AsVector();
  goal_state[3] = start_state[3] + NormalizeYaw(goal.yaw - start_state[3]);
  if (mode == PlanMode::k2d) goal_state[2] = start_state[2];

  CheckWithinBounds(start_state, world, "start");
  CheckWithinBounds(goal_state, world, "goal");

  Eigen::VectorXd lower(layout.dimension());
  Eigen::VectorXd upper(layout.dimension());
  lower[layout.time_index()] = config.time_lower;
  upper[layout.time_index()] = config.time_upper;
  for (int k = 0; k <= n; ++k) {
    lower.segment<8>(layout.state_index(k)) = world.state_lower;
    upper.segment<8>(layout.state_index(k)) = world.state_upper;
    lower.segment<4>(layout.command_index(k)) = world.command_lower;
    upper.segment<4>(layout.command_index(k)) = world.command_upper;
    if (mode == PlanMode::k2d) {
      for (int i : {2, 6}) {
        lower[layout.state_index(k) + i] = start_state[i];
        upper[layout.state_index(k) + i] = start_state[i];
      }
      lower[layout.command_index(k) + 2] = 0.0;
      upper[layout.command_index(k) + 2] = 0.0;
    }
  }
  // The boundary conditions are also stated as equality constraints; fixing
  // them in the box too keeps every iterate on them.
  lower.segment<8>(layout.state_index(0)) = start_state;
  upper.segment<8>(layout.state_index(0)) = start_state;
  lower.segment<8>(layout.state_index(n)) = goal_state;
  upper.segment<8>(layout.state_index(n)) = goal_state;
  lower.segment<4>(layout.command_index(n)).setZero();
  upper.segment<4>(layout.command_index(n)).setZero();

  // Straight-line guess at rest, traversed at half the horizontal speed.
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(layout.dimension());
  const double v_max =
      std::min({-world.state_lower[4], world.state_upper[4],
                -world.state_lower[5], world.state_upper[5]});
  const double distance = (goal_state.head<2>() - start_state.head<2>()).norm();
  double t_guess = v_max > 0.0 ? distance / (0.5 * v_max) : config.time_lower;
  guess[layout.time_index()] =
      std::clamp(t_guess, config.time_lower, config.time_upper);
  for (int k = 0; k <= n; ++k) {
    const double a = static_cast<double>(k) / n;
    guess.segment<4>(layout.state_index(k)) =
        (1.0 - a) * start_state.head<4>() + a * goal_state.head<4>();
  }

  // In the plane, a straight guess through an obstacle sits on a symmetry
  // plane of the distance function; start from a detour instead.
  if (mode == PlanMode::k2d && !world.obstacles.empty()) {
    std::vector<Eigen::Vector3d> points(n + 1);
    bool collides = false;
    const double required =
        world.clearance + config.clearance_margin + config.smoothing;
    for (int k = 0; k <= n; ++k) {
      points[k] = guess.segment<3>(layout.state_index(k));
      collides |= SignedDistance(points[k], world) < required;
    }
    if (collides) {
      Eigen::Vector2d dir = goal_state.head<2>() - start_state.head<2>();
      Eigen::Vector2d normal(0.0, 1.0);
      if (dir.norm() > 0.0) normal = Eigen::Vector2d(-dir.y(), dir.x()).normalized();
      double side = 1.0;
      const std::vector<double> shift =
          LateralDetour(points, normal, world, required, &side);
      double path_length = 0.0;
      for (int k = 0; k <= n; ++k) {
        guess.segment<2>(layout.state_index(k)) += side * shift[k] * normal;
        if (k > 0) {
          path_length += (guess.segment<2>(layout.state_index(k)) -
                          guess.segment<2>(layout.state_index(k - 1)))
                             .norm();
        }
      }
      if (v_max > 0.0) t_guess = path_length / (0.5 * v_max);
      guess[layout.time_index()] =
          std::clamp(t_guess, config.time_lower, config.time_upper);
    }
  }

  auto model = std::make_shared<CollocationModel>(
      CollocationModel{layout, world, config, start_state, goal_state});

  Transcription out;
  out.layout = layout;
  out.start_state = start_state;
  out.goal_state = goal_state;
  out.initial_guess = guess.cwiseMax(lower).cwiseMin(upper);

  nlp::NlpProblem& problem = out.problem;
  problem.dimension = layout.dimension();
  problem.objective = [model](const Eigen::VectorXd& z) {
    return model->Objective(z);
  };
  problem.objective_gradient = [model](const Eigen::VectorXd& z) {
    return model->ObjectiveGradient(z);
  };
  problem.num_equalities = layout.num_equalities();
  problem.equality_constraints = [model](const Eigen::VectorXd& z) {
    return model->Equalities(z);
  };
  problem.equality_jacobian = [model](const Eigen::VectorXd& z) {
    return model->EqualityJacobian(z);
  };
  if (!world.obstacles.empty()) {
    problem.num_inequalities = layout.num_collision_constraints();
    problem.inequality_constraints = [model](const Eigen::VectorXd& z) {
      return model->Inequalities(z);
    };
    problem.inequality_jacobian = [model](const Eigen::VectorXd& z) {
      return model->InequalityJacobian(z);
    };
  }
  problem.lagrangian_hessian = [model](const Eigen::VectorXd& z,
                                      const Eigen::VectorXd& lambda,
                                      const Eigen::VectorXd& mu) {
    return model->LagrangianHessian(z, lambda, mu);
  };
  problem.variable_lower = lower;
  problem.variable_upper = upper;
  return out;
}

TorsoTrajectory DecodeTrajectory(const CollocationLayout& layout,
                                 const Eigen::VectorXd& z) {
  TorsoTrajectory traj;
  const int n = layout.num_intervals();
  traj.total_time = z[layout.time_index()];
  traj.knots.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    TrajectoryKnot& knot = traj.knots[k];
    knot.time = traj.total_time * k / n;
    knot.state = TorsoState::Unflatten(z.segment<8>(layout.state_index(k)));
    knot.state.pose.yaw = NormalizeYaw(knot.state.pose.yaw);
    knot.command.accel = z.segment<4>(layout.command_index(k));
  }
  return traj;
}

PlanReport PlanWithMode(const TorsoPose& start, const TorsoPose& goal,
                        const World& world, const PlannerConfig& config,
                        PlanMode mode) {
  const Transcription tr = Transcribe(start, goal, world, config, mode);
  if (tr.start_state == tr.goal_state) {
    return TrivialReport(start, config);
  }
  const nlp::NlpSolution sol =
      nlp::SolveNlp(tr.problem, tr.initial_guess, config.solver);

  PlanReport report;
  report.trajectory = DecodeTrajectory(tr.layout, sol.point);
  report.solver_status = sol.status;
  report.solver_iterations = sol.iterations;
  report.solver_inner_iterations = sol.inner_iterations;
  report.kkt_residual = sol.kkt_residual;
  report.constraint_violation = sol.constraint_violation;
  report.max_dynamics_defect = MaxDynamicsDefect(report.trajectory);

  double clearance = SignedDistance(
      report.trajectory.knots.front().state.pose.Position(), world);
  const int n = report.trajectory.num_intervals();
  for (int k = 0; k < n; ++k) {
    const double t_mid = 0.5 * (report.trajectory.knots[k].time +
                                report.trajectory.knots[k + 1].time);
    clearance = std::min(
        {clearance,
         SignedDistance(report.trajectory.knots[k + 1].state.pose.Position(),
                        world),
         SignedDistance(
             HermiteState(report.trajectory, t_mid).pose.Position(), world)});
  }
  report.min_clearance = clearance;
  return report;
}

PlanReport Plan(const TorsoPose& start, const TorsoPose& goal,
                const World& world, const PlannerConfig& config) {
  return PlanWithMode(start, goal, world, config, PlanMode::k3d);
}

PlanReport Plan2d(const TorsoPose& start, const TorsoPose& goal,
                  const World& world, const PlannerConfig& config) {
  return PlanWithMode(start, goal, world, config, PlanMode::k2d);
}

TorsoState HermiteState(const TorsoTrajectory& traj, double t) {
  const int n = traj.num_intervals();
  if (n <= 0 || traj.total_time <= 0.0) return traj.knots.front().state;
  const double h = traj.total_time / n;
  const double clamped = std::clamp(t, 0.0, traj.total_time);
  const int k = std::min(static_cast<int>(clamped / h), n - 1);
  const double tau = (clamped - traj.knots[k].time) / h;

  const Eigen::Vector4d p0 = KnotPosition(traj, k);
  const Eigen::Vector4d p1 = UnwrappedNext(traj, k);
  const Eigen::Vector4d v0 = traj.knots[k].state.twist;
  const Eigen::Vector4d v1 = traj.knots[k + 1].state.twist;

  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double d00 = 6 * t2 - 6 * tau;
  const double d10 = 3 * t2 - 4 * tau + 1;
  const double d01 = -6 * t2 + 6 * tau;
  const double d11 = 3 * t2 - 2 * tau;

  TorsoState s;
  Eigen::Vector4d pose = h00 * p0 + h10 * h * v0 + h01 * p1 + h11 * h * v1;
  pose[3] = NormalizeYaw(pose[3]);
  s.pose = TorsoPose::FromVector(pose);
  s.twist = (d00 * p0 + d01 * p1) / h + d10 * v0 + d11 * v1;
  return s;
}

double MaxDynamicsDefect(const TorsoTrajectory& traj) {
  double worst = 0.0;
  const int n = traj.num_intervals();
  for (int k = 0; k < n; ++k) {
    const double h = traj.knots[k + 1].time - traj.knots[k].time;
    const Eigen::Vector4d p0 = KnotPosition(traj, k);
    const Eigen::Vector4d p1 = UnwrappedNext(traj, k);
    const Eigen::Vector4d& v0 = traj.knots[k].state.twist;
    const Eigen::Vector4d& v1 = traj.knots[k + 1].state.twist;
    const Eigen::Vector4d& u0 = traj.knots[k].command.accel;
    const Eigen::Vector4d& u1 = traj.knots[k + 1].command.accel;
    const Eigen::Vector4d dp = p1 - p0 - 0.5 * h * (v0 + v1);
    const Eigen::Vector4d dv = v1 - v0 - 0.5 * h * (u0 + u1);
    worst = std::max({worst, dp.cwiseAbs().maxCoeff(),
                      dv.cwiseAbs().maxCoeff()});
  }
  return worst;
}

TrajectoryAudit AuditTrajectory(const TorsoTrajectory& traj,
                                const World& world, int oversample,
                                int rk4_substeps) {
  traj.CheckInvariants();
  TrajectoryAudit audit;
  audit.max_dynamics_defect = MaxDynamicsDefect(traj);
  const int n = traj.num_intervals();

  // RK4 on x_dot = [v, u(t)] with u piecewise linear between knots.
  Vector8d x = traj.knots.front().state.Flatten();
  for (int k = 0; k < n; ++k) {
    const double t0 = traj.knots[k].time;
    const double h = traj.knots[k + 1].time - t0;
    const Eigen::Vector4d& u0 = traj.knots[k].command.accel;
    const Eigen::Vector4d& u1 = traj.knots[k + 1].command.accel;
    auto command = [&](double t) -> Eigen::Vector4d {
      const double a = (t - t0) / h;
      return (1.0 - a) * u0 + a * u1;
    };
    auto deriv = [&](double t, const Vector8d& s) {
      Vector8d d;
      d << s.tail<4>(), command(t);
      return d;
    };
    const double dt = h / rk4_substeps;
    for (int j = 0; j < rk4_substeps; ++j) {
      const double t = t0 + j * dt;
      const Vector8d k1 = deriv(t, x);
      const Vector8d k2 = deriv(t + 0.5 * dt, x + 0.5 * dt * k1);
      const Vector8d k3 = deriv(t + 0.5 * dt, x + 0.5 * dt * k2);
      const Vector8d k4 = deriv(t + dt, x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  Vector8d diff = x - traj.knots.back().state.Flatten();
  diff[3] = NormalizeYaw(diff[3]);
  audit.endpoint_error = diff.cwiseAbs().maxCoeff();

  const int samples = std::max(1, n * oversample);
  audit.min_clearance = kNoObstacleDistance;
  for (int j = 0; j <= samples; ++j) {
    const double t = traj.total_time * j / samples;
    audit.min_clearance =
        std::min(audit.min_clearance,
                 SignedDistance(HermiteState(traj, t).pose.Position(), world));
  }
  return audit;
}

double RestToRestTime(double distance, double max_velocity,
                      double max_acceleration) {
  const double d = std::abs(distance);
  if (d == 0.0) return 0.0;
  if (d <= max_velocity * max_velocity / max_acceleration) {
    return 2.0 * std::sqrt(d / max_acceleration);
  }
  return d / max_velocity + max_velocity / max_acceleration;
}

double MinimumTimeLowerBound(const TorsoPose& start, const TorsoPose& goal,
                             const World& world) {
  Eigen::Vector4d delta = goal.AsVector() - start.AsVector();
  delta[3] = NormalizeYaw(delta[3]);
  double t = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double v = std::min(-world.state_lower[4 + i],
                              world.state_upper[4 + i]);
    const double a = std::min(-world.command_lower[i], world.command_upper[i]);
    if (v <= 0.0 || a <= 0.0) continue;
    t = std::max(t, RestToRestTime(delta[i], v, a));
  }
  return t;
}

}  // namespace quadcrawl
