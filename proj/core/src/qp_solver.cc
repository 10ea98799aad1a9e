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

#include "quadcrawl/qp_solver.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace quadcrawl {
namespace nlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Factorization state of the dual active-set method. With N the matrix whose
// columns are the active constraint normals, J^T N = [R; 0] and J J^T = H^-1.
class ActiveSetFactor {
 public:
  ActiveSetFactor(const Eigen::MatrixXd& j_init)
      : n_(static_cast<int>(j_init.rows())),
        j_(j_init),
        r_(Eigen::MatrixXd::Zero(n_, n_)) {}

  int size() const { return q_; }

  Eigen::VectorXd Project(const Eigen::VectorXd& normal) const {
    return j_.transpose() * normal;
  }

  // Primal step direction J2 d2.
  Eigen::VectorXd PrimalDirection(const Eigen::VectorXd& d) const {
    return j_.rightCols(n_ - q_) * d.tail(n_ - q_);
  }

  // Dual step direction R^-1 d1.
  Eigen::VectorXd DualDirection(const Eigen::VectorXd& d) const {
    if (q_ == 0) return Eigen::VectorXd(0);
    return r_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(
        d.head(q_));
  }

  // Appends a constraint whose projected normal is `d`. Returns false when
  // it is linearly dependent on the active set.
  bool Add(Eigen::VectorXd d) {
    for (int j = n_ - 1; j > q_; --j) {
      const double a = d[j - 1];
      const double b = d[j];
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double s = b / h;
      d[j - 1] = h;
      d[j] = 0.0;
      Rotate(j - 1, j, c, s);
    }
    const double scale = std::max(1.0, d.head(q_ + 1).cwiseAbs().maxCoeff());
    if (std::abs(d[q_]) <= 1e-13 * scale) return false;
    r_.col(q_).head(q_ + 1) = d.head(q_ + 1);
    ++q_;
    return true;
  }

  // Removes the active constraint at position `l` and re-triangularizes R.
  void Remove(int l) {
    for (int j = l; j < q_ - 1; ++j) r_.col(j) = r_.col(j + 1);
    r_.col(q_ - 1).setZero();
    --q_;
    for (int j = l; j < q_; ++j) {
      const double a = r_(j, j);
      const double b = r_(j + 1, j);
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double s = b / h;
      r_(j, j) = h;
      r_(j + 1, j) = 0.0;
      for (int k = j + 1; k < q_; ++k) {
        const double ra = r_(j, k);
        const double rb = r_(j + 1, k);
        r_(j, k) = c * ra + s * rb;
        r_(j + 1, k) = -s * ra + c * rb;
      }
      Rotate(j, j + 1, c, s);
    }
  }

 private:
  void Rotate(int a, int b, double c, double s) {
    for (int k = 0; k < n_; ++k) {
      const double ja = j_(k, a);
      const double jb = j_(k, b);
      j_(k, a) = c * ja + s * jb;
      j_(k, b) = -s * ja + c * jb;
    }
  }

  int n_;
  int q_ = 0;
  Eigen::MatrixXd j_;
  Eigen::MatrixXd r_;
};

}  // namespace

const char* ToString(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal:
      return "optimal";
    case QpStatus::kInfeasible:
      return "infeasible";
    case QpStatus::kNotConvex:
      return "not_convex";
    case QpStatus::kMaxIterations:
      return "max_iters";
  }
  return "unknown";
}

QpSolution SolveQp(const QpProblem& problem, int max_iterations) {
  const int n = static_cast<int>(problem.hessian.rows());
  const int me = static_cast<int>(problem.equality_matrix.rows());
  const int mi = static_cast<int>(problem.inequality_matrix.rows());
  if (problem.hessian.cols() != n || problem.gradient.size() != n) {
    throw std::invalid_argument("SolveQp: hessian/gradient size mismatch");
  }
  if ((me > 0 && problem.equality_matrix.cols() != n) ||
      problem.equality_rhs.size() != me) {
    throw std::invalid_argument("SolveQp: equality block size mismatch");
  }
  if ((mi > 0 && problem.inequality_matrix.cols() != n) ||
      problem.inequality_rhs.size() != mi) {
    throw std::invalid_argument("SolveQp: inequality block size mismatch");
  }

  QpSolution sol;
  sol.equality_multipliers = Eigen::VectorXd::Zero(me);
  sol.inequality_multipliers = Eigen::VectorXd::Zero(mi);

  const Eigen::LLT<Eigen::MatrixXd> llt(problem.hessian);
  if (llt.info() != Eigen::Success) {
    sol.status = QpStatus::kNotConvex;
    sol.x = Eigen::VectorXd::Zero(n);
    return sol;
  }
  const Eigen::MatrixXd j_init =
      llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  ActiveSetFactor factor(j_init);

  // Unconstrained minimizer.
  Eigen::VectorXd x = -llt.solve(problem.gradient);

  // active[k] >= 0 is an inequality row, -1 - i encodes equality row i.
  std::vector<int> active;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  std::vector<bool> is_active(mi, false);

  for (int i = 0; i < me; ++i) {
    const Eigen::VectorXd np = problem.equality_matrix.row(i).transpose();
    const Eigen::VectorXd d = factor.Project(np);
    const Eigen::VectorXd z = factor.PrimalDirection(d);
    const Eigen::VectorXd r = factor.DualDirection(d);
    const double residual = np.dot(x) - problem.equality_rhs[i];
    double t = 0.0;
    const double curvature = z.dot(np);
    if (std::abs(curvature) > 1e-14) t = -residual / curvature;
    x += t * z;
    const int q = factor.size();
    u.head(q) -= t * r;
    u[q] = t;
    if (!factor.Add(d)) {
      sol.status = QpStatus::kInfeasible;
      sol.x = x;
      return sol;
    }
    active.push_back(-1 - i);
  }

  int iterations = 0;
  while (true) {
    if (++iterations > max_iterations) {
      sol.status = QpStatus::kMaxIterations;
      break;
    }
    // Most violated inactive inequality.
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < mi; ++i) {
      if (is_active[i]) continue;
      const auto row = problem.inequality_matrix.row(i);
      const double s = row.dot(x) - problem.inequality_rhs[i];
      const double tol =
          1e-12 * (1.0 + std::abs(problem.inequality_rhs[i]) +
                   row.cwiseAbs().sum() * x.cwiseAbs().maxCoeff());
      if (s < -tol && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) {
      sol.status = QpStatus::kOptimal;
      break;
    }

    const Eigen::VectorXd np = problem.inequality_matrix.row(p).transpose();
    double slack = worst;
    u[factor.size()] = 0.0;
    bool added = false;
    while (!added) {
      const int q = factor.size();
      const Eigen::VectorXd d = factor.Project(np);
      const Eigen::VectorXd z = factor.PrimalDirection(d);
      const Eigen::VectorXd r = factor.DualDirection(d);

      // Largest dual step keeping active inequality multipliers >= 0.
      double t1 = kInf;
      int drop = -1;
      for (int k = 0; k < q; ++k) {
        if (active[k] < 0 || r[k] <= 0.0) continue;
        const double ratio = u[k] / r[k];
        if (ratio < t1) {
          t1 = ratio;
          drop = k;
        }
      }
      double t2 = kInf;
      const double curvature = z.dot(np);
      if (z.squaredNorm() > 1e-24 && curvature > 0.0) t2 = -slack / curvature;

      const double t = std::min(t1, t2);
      if (t == kInf) {
        sol.status = QpStatus::kInfeasible;
        sol.x = x;
        sol.iterations = iterations;
        return sol;
      }
      if (t2 == kInf) {
        u.head(q) -= t * r;
        u[q] += t;
        is_active[active[drop]] = false;
        active.erase(active.begin() + drop);
        for (int k = drop; k < q; ++k) u[k] = u[k + 1];
        factor.Remove(drop);
        continue;
      }
      x += t * z;
      u.head(q) -= t * r;
      u[q] += t;
      if (t2 <= t1) {
        if (!factor.Add(d)) {
          sol.status = QpStatus::kInfeasible;
          sol.x = x;
          sol.iterations = iterations;
          return sol;
        }
        active.push_back(p);
        is_active[p] = true;
        added = true;
      } else {
        is_active[active[drop]] = false;
        active.erase(active.begin() + drop);
        for (int k = drop; k < q; ++k) u[k] = u[k + 1];
        factor.Remove(drop);
        slack = np.dot(x) - problem.inequality_rhs[p];
      }
    }
  }

  sol.x = x;
  sol.iterations = iterations;
  sol.objective = 0.5 * x.dot(problem.hessian * x) + problem.gradient.dot(x);
  for (size_t k = 0; k < active.size(); ++k) {
    if (active[k] < 0) {
      sol.equality_multipliers[-1 - active[k]] = u[k];
    } else {
      sol.inequality_multipliers[active[k]] = u[k];
      sol.active_inequalities.push_back(active[k]);
    }
  }
  return sol;
}

}  // namespace nlp
}  // namespace quadcrawl
