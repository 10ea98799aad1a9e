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

// Minimum-time torso planning by trapezoidal direct collocation.
//
// Decision vector z = [T, x_0 .. x_N, u_0 .. u_N] with x_k = [s_k, s_dot_k]
// (8 entries) and u_k = s_ddot_k (4 entries). The dynamics are the double
// integrator x_dot = [s_dot, u]; knots are spaced T / N apart.

#ifndef QUADCRAWL_PLANNER_H_
#define QUADCRAWL_PLANNER_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "quadcrawl/nlp_solver.h"
#include "quadcrawl/types.h"

namespace quadcrawl {

struct PlannerConfig {
  int knot_count = 100;  // N, the number of intervals
  double time_lower = 0.1;
  double time_upper = 60.0;
  // Weight of the integrated squared acceleration added to T. Small enough
  // to leave T essentially unchanged; it makes the axes that do not limit T
  // follow a unique smooth profile.
  double effort_weight = 1e-3;
  // Width of the distance surrogate's blends.
  double smoothing = 0.01;
  // Extra clearance demanded by the solver on top of World::clearance so
  // that solutions within tol_feas still meet the clearance exactly.
  double clearance_margin = 1e-4;
  // A stiff initial penalty keeps the first subproblem from collapsing T to
  // its lower bound while the defects are still cheap to violate.
  nlp::NlpOptions solver = [] {
    nlp::NlpOptions options;
    options.initial_penalty = 1e3;
    return options;
  }();

  // Throws std::invalid_argument.
  void Validate() const;
};

enum class PlanMode {
  k3d,
  // z and z_dot frozen at the start height; obstacles must be circumvented.
  k2d,
};

// Raised when the start or goal pose violates the clearance.
class CollisionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index map of the collocation decision vector.
class CollocationLayout {
 public:
  explicit CollocationLayout(int num_intervals) : n_(num_intervals) {}

  int num_intervals() const { return n_; }
  int num_knots() const { return n_ + 1; }
  int dimension() const { return 1 + 12 * (n_ + 1); }
  int time_index() const { return 0; }
  int state_index(int k) const { return 1 + 8 * k; }
  int command_index(int k) const { return 1 + 8 * (n_ + 1) + 4 * k; }

  int num_equalities() const { return 8 * n_ + 20; }
  int num_collision_constraints() const { return 2 * n_ + 1; }

 private:
  int n_;
};

struct Transcription {
  CollocationLayout layout{1};
  nlp::NlpProblem problem;
  Eigen::VectorXd initial_guess;
  // Goal as enforced (yaw unwrapped toward the start; z frozen in 2D mode).
  Vector8d start_state;
  Vector8d goal_state;
};

// Builds the NLP. Throws CollisionError if start or goal is closer than the
// clearance to an obstacle and std::invalid_argument for out-of-bounds
// poses or invalid configs.
Transcription Transcribe(const TorsoPose& start, const TorsoPose& goal,
                         const World& world, const PlannerConfig& config,
                         PlanMode mode = PlanMode::k3d);

// Reads the trajectory out of a decision vector.
TorsoTrajectory DecodeTrajectory(const CollocationLayout& layout,
                                 const Eigen::VectorXd& z);

struct PlanReport {
  TorsoTrajectory trajectory;
  // Exact signed distance minimized over knots and interval midpoints,
  // recomputed from the decoded trajectory.
  double min_clearance = 0.0;
  double max_dynamics_defect = 0.0;
  nlp::NlpStatus solver_status = nlp::NlpStatus::kMaxIterations;
  int solver_iterations = 0;
  int solver_inner_iterations = 0;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;

  bool converged() const {
    return solver_status == nlp::NlpStatus::kConverged;
  }
};

PlanReport Plan(const TorsoPose& start, const TorsoPose& goal,
                const World& world, const PlannerConfig& config);

// Same problem with the torso height frozen at start.z.
PlanReport Plan2d(const TorsoPose& start, const TorsoPose& goal,
                  const World& world, const PlannerConfig& config);

PlanReport PlanWithMode(const TorsoPose& start, const TorsoPose& goal,
                        const World& world, const PlannerConfig& config,
                        PlanMode mode);

// State at time t on the piecewise-cubic Hermite interpolant of the knots
// (velocities interpolated linearly between knots would be inconsistent with
// the positions; here both come from the same cubic).
TorsoState HermiteState(const TorsoTrajectory& traj, double t);

// Trapezoidal collocation defects recomputed from the knots (inf-norm).
double MaxDynamicsDefect(const TorsoTrajectory& traj);

struct TrajectoryAudit {
  // max_i |x_i(T) - x_N,i| after RK4 re-integration from x_0 under the
  // piecewise-linear stored commands.
  double endpoint_error = 0.0;
  // min signed distance over a uniformly oversampled time grid.
  double min_clearance = 0.0;
  double max_dynamics_defect = 0.0;
};

// Independent feasibility check; uses none of the solver's internals.
TrajectoryAudit AuditTrajectory(const TorsoTrajectory& traj,
                                const World& world, int oversample = 10,
                                int rk4_substeps = 8);

// Analytic rest-to-rest minimum time under the per-axis velocity and
// acceleration bounds (the slowest axis decides), ignoring obstacles.
double MinimumTimeLowerBound(const TorsoPose& start, const TorsoPose& goal,
                             const World& world);

// Rest-to-rest minimum time of one axis with symmetric bounds.
double RestToRestTime(double distance, double max_velocity,
                      double max_acceleration);

}  // namespace quadcrawl

#endif  // QUADCRAWL_PLANNER_H_
