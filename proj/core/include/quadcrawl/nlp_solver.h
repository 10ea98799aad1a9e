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

// Smooth constrained nonlinear programming.
//
//   minimize    f(z)
//   subject to  h(z) = 0
//               g(z) >= 0
//               lower <= z <= upper
//
// solved by a Powell-Hestenes-Rockafellar augmented Lagrangian outer loop.
// The bound-constrained subproblems are minimized by projected Newton when
// the problem supplies a Lagrangian Hessian and by projected L-BFGS otherwise.
// Multipliers follow the Lagrangian L = f + lambda^T h - mu^T g, mu >= 0.

#ifndef QUADCRAWL_NLP_SOLVER_H_
#define QUADCRAWL_NLP_SOLVER_H_

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace quadcrawl {
namespace nlp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<SparseMatrix(const Eigen::VectorXd&)>;
// (z, lambda, mu) -> grad^2 f + sum lambda_i grad^2 h_i - sum mu_j grad^2 g_j,
// both triangles stored.
using HessianFn = std::function<SparseMatrix(
    const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)>;

struct NlpProblem {
  int dimension = 0;
  ScalarFn objective;
  // Optional; central differences are used when absent.
  VectorFn objective_gradient;

  int num_equalities = 0;
  VectorFn equality_constraints;
  JacobianFn equality_jacobian;  // optional

  int num_inequalities = 0;
  VectorFn inequality_constraints;  // convention g(z) >= 0
  JacobianFn inequality_jacobian;   // optional

  HessianFn lagrangian_hessian;  // optional

  // Empty vectors mean unbounded.
  Eigen::VectorXd variable_lower;
  Eigen::VectorXd variable_upper;
};

struct NlpOptions {
  double tol_kkt = 1e-4;
  double tol_feas = 1e-5;
  int max_outer_iterations = 50;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e8;
  // The penalty grows when an outer iteration fails to shrink the constraint
  // violation by this factor.
  double required_violation_decrease = 0.25;
  int max_inner_iterations = 4000;
  int lbfgs_memory = 10;
  // Outer iterations at maximum penalty without feasibility progress before
  // the problem is declared infeasible.
  int infeasible_stall_limit = 6;
  double finite_difference_step = 1e-6;
};

enum class NlpStatus { kConverged, kMaxIterations, kInfeasible, kNumericalFailure };
const char* ToString(NlpStatus status);

struct OuterIterationLog {
  double objective = 0.0;
  double constraint_violation = 0.0;
  double kkt_residual = 0.0;
  double penalty = 0.0;
  int inner_iterations = 0;
};

struct NlpSolution {
  Eigen::VectorXd point;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  // max(|h|_inf, max(0, -g)_inf); bound violations are impossible because
  // every iterate is projected onto the box.
  double constraint_violation = 0.0;
  int iterations = 0;  // outer iterations
  int inner_iterations = 0;
  NlpStatus status = NlpStatus::kMaxIterations;
  Eigen::VectorXd equality_multipliers;
  Eigen::VectorXd inequality_multipliers;
  std::vector<OuterIterationLog> history;
};

// Initial points outside the box are clamped. Never throws for solver
// failures; inspect `status`. Throws std::invalid_argument on malformed
// problems (missing callbacks, inconsistent sizes).
NlpSolution SolveNlp(const NlpProblem& problem,
                     const Eigen::VectorXd& initial_point,
                     const NlpOptions& options = {});

// Central-difference Jacobian, one column per coordinate. Throws
// std::domain_error if any evaluation is non-finite.
Eigen::MatrixXd NumericJacobian(const VectorFn& f, const Eigen::VectorXd& point,
                                double step);

// Gradient of f via NumericJacobian.
Eigen::VectorXd NumericGradient(const ScalarFn& f, const Eigen::VectorXd& point,
                                double step);

// ||P(z - grad L) - z||_inf plus the complementarity residual
// max_j max(|mu_j g_j|, -mu_j). `multipliers` stacks [lambda; mu].
double KktResidual(const NlpProblem& problem, const Eigen::VectorXd& point,
                   const Eigen::VectorXd& multipliers);

double ConstraintViolation(const NlpProblem& problem,
                           const Eigen::VectorXd& point);

// Evaluates the problem's analytic derivatives, falling back to finite
// differences where a callback is absent.
Eigen::VectorXd EvalObjectiveGradient(const NlpProblem& problem,
                                      const Eigen::VectorXd& point,
                                      double fd_step = 1e-6);
SparseMatrix EvalEqualityJacobian(const NlpProblem& problem,
                                  const Eigen::VectorXd& point,
                                  double fd_step = 1e-6);
SparseMatrix EvalInequalityJacobian(const NlpProblem& problem,
                                    const Eigen::VectorXd& point,
                                    double fd_step = 1e-6);

}  // namespace nlp
}  // namespace quadcrawl

#endif  // QUADCRAWL_NLP_SOLVER_H_
