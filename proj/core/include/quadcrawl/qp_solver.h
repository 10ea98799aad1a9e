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

// Dense strictly convex quadratic programming:
//
//   minimize    1/2 x^T H x + g^T x
//   subject to  A_eq x  = b_eq
//               A_in x >= b_in
//
// using the Goldfarb-Idnani dual active-set method. H must be symmetric
// positive definite. Intended for small problems (a few hundred variables).

#ifndef QUADCRAWL_QP_SOLVER_H_
#define QUADCRAWL_QP_SOLVER_H_

#include <vector>

#include <Eigen/Core>

namespace quadcrawl {
namespace nlp {

struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd equality_matrix;  // rows are constraints; may be empty
  Eigen::VectorXd equality_rhs;
  Eigen::MatrixXd inequality_matrix;
  Eigen::VectorXd inequality_rhs;
};

enum class QpStatus { kOptimal, kInfeasible, kNotConvex, kMaxIterations };
const char* ToString(QpStatus status);

struct QpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  QpStatus status = QpStatus::kOptimal;
  int iterations = 0;
  // Indices into the inequality rows that are active at the solution.
  std::vector<int> active_inequalities;
  // Multipliers of the equality rows and of every inequality row (zero when
  // inactive), with L = f - y^T (A x - b).
  Eigen::VectorXd equality_multipliers;
  Eigen::VectorXd inequality_multipliers;
};

// Throws std::invalid_argument on dimension mismatches.
QpSolution SolveQp(const QpProblem& problem, int max_iterations = 1000);

}  // namespace nlp
}  // namespace quadcrawl

#endif  // QUADCRAWL_QP_SOLVER_H_
