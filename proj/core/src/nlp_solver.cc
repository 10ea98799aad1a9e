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

#include "quadcrawl/nlp_solver.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

namespace quadcrawl {
namespace nlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown internally when a callback produces NaN/Inf.
struct NonFiniteError {};

void CheckFinite(const Eigen::VectorXd& v) {
  if (!v.allFinite()) throw NonFiniteError{};
}

void CheckFinite(double v) {
  if (!std::isfinite(v)) throw NonFiniteError{};
}

Eigen::VectorXd Lower(const NlpProblem& p) {
  if (p.variable_lower.size() == 0) {
    return Eigen::VectorXd::Constant(p.dimension, -kInf);
  }
  return p.variable_lower;
}

Eigen::VectorXd Upper(const NlpProblem& p) {
  if (p.variable_upper.size() == 0) {
    return Eigen::VectorXd::Constant(p.dimension, kInf);
  }
  return p.variable_upper;
}

void ValidateProblem(const NlpProblem& p) {
  if (p.dimension <= 0) {
    throw std::invalid_argument("NlpProblem: dimension must be positive");
  }
  if (!p.objective) throw std::invalid_argument("NlpProblem: no objective");
  if (p.num_equalities > 0 && !p.equality_constraints) {
    throw std::invalid_argument("NlpProblem: missing equality callback");
  }
  if (p.num_inequalities > 0 && !p.inequality_constraints) {
    throw std::invalid_argument("NlpProblem: missing inequality callback");
  }
  if (p.variable_lower.size() != 0 && p.variable_lower.size() != p.dimension) {
    throw std::invalid_argument("NlpProblem: variable_lower has wrong size");
  }
  if (p.variable_upper.size() != 0 && p.variable_upper.size() != p.dimension) {
    throw std::invalid_argument("NlpProblem: variable_upper has wrong size");
  }
  if (p.variable_lower.size() != 0 && p.variable_upper.size() != 0 &&
      (p.variable_lower.array() > p.variable_upper.array()).any()) {
    throw std::invalid_argument("NlpProblem: variable_lower > variable_upper");
  }
}

Eigen::VectorXd EvalEqualities(const NlpProblem& p, const Eigen::VectorXd& z) {
  if (p.num_equalities == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd h = p.equality_constraints(z);
  if (h.size() != p.num_equalities) {
    throw std::invalid_argument("NlpProblem: equality callback size mismatch");
  }
  return h;
}

Eigen::VectorXd EvalInequalities(const NlpProblem& p,
                                 const Eigen::VectorXd& z) {
  if (p.num_inequalities == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd g = p.inequality_constraints(z);
  if (g.size() != p.num_inequalities) {
    throw std::invalid_argument(
        "NlpProblem: inequality callback size mismatch");
  }
  return g;
}

double Violation(const Eigen::VectorXd& h, const Eigen::VectorXd& g) {
  double v = 0.0;
  if (h.size() > 0) v = std::max(v, h.cwiseAbs().maxCoeff());
  if (g.size() > 0) v = std::max(v, (-g).cwiseMax(0.0).maxCoeff());
  return v;
}

// ||P(z - grad) - z||_inf over the box [lo, hi].
double ProjectedGradientNorm(const Eigen::VectorXd& z,
                             const Eigen::VectorXd& grad,
                             const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  const Eigen::VectorXd step = (z - grad).cwiseMax(lo).cwiseMin(hi) - z;
  return step.size() == 0 ? 0.0 : step.cwiseAbs().maxCoeff();
}

// Augmented Lagrangian for fixed multipliers and penalty.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const NlpProblem& problem, const Eigen::VectorXd& lambda,
                      const Eigen::VectorXd& mu, double rho, double fd_step)
      : problem_(problem),
        lambda_(lambda),
        mu_(mu),
        rho_(rho),
        fd_step_(fd_step) {}

  double Value(const Eigen::VectorXd& z) const {
    const double f = problem_.objective(z);
    CheckFinite(f);
    const Eigen::VectorXd h = EvalEqualities(problem_, z);
    const Eigen::VectorXd g = EvalInequalities(problem_, z);
    CheckFinite(h);
    CheckFinite(g);
    double value = f;
    if (h.size() > 0) value += lambda_.dot(h) + 0.5 * rho_ * h.squaredNorm();
    if (g.size() > 0) {
      const Eigen::VectorXd shifted = (mu_ - rho_ * g).cwiseMax(0.0);
      value += (shifted.squaredNorm() - mu_.squaredNorm()) / (2.0 * rho_);
    }
    return value;
  }

  Eigen::VectorXd Gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd grad = EvalObjectiveGradient(problem_, z, fd_step_);
    CheckFinite(grad);
    if (problem_.num_equalities > 0) {
      const Eigen::VectorXd h = EvalEqualities(problem_, z);
      const SparseMatrix jac = EvalEqualityJacobian(problem_, z, fd_step_);
      grad += jac.transpose() * (lambda_ + rho_ * h);
    }
    if (problem_.num_inequalities > 0) {
      const Eigen::VectorXd g = EvalInequalities(problem_, z);
      const SparseMatrix jac = EvalInequalityJacobian(problem_, z, fd_step_);
      grad -= jac.transpose() * (mu_ - rho_ * g).cwiseMax(0.0);
    }
    CheckFinite(grad);
    return grad;
  }

  // Exact Hessian of the augmented Lagrangian away from the kinks of the
  // inequality term. Requires problem.lagrangian_hessian.
  Eigen::SparseMatrix<double> Hessian(const Eigen::VectorXd& z) const {
    Eigen::VectorXd lambda_eff = lambda_;
    Eigen::VectorXd mu_eff = mu_;
    Eigen::SparseMatrix<double> gauss_newton(problem_.dimension,
                                             problem_.dimension);
    if (problem_.num_equalities > 0) {
      const Eigen::VectorXd h = EvalEqualities(problem_, z);
      const Eigen::SparseMatrix<double> jac =
          EvalEqualityJacobian(problem_, z, fd_step_);
      lambda_eff += rho_ * h;
      gauss_newton += rho_ * Eigen::SparseMatrix<double>(jac.transpose() * jac);
    }
    if (problem_.num_inequalities > 0) {
      const Eigen::VectorXd g = EvalInequalities(problem_, z);
      Eigen::SparseMatrix<double> jac =
          EvalInequalityJacobian(problem_, z, fd_step_);
      mu_eff = (mu_ - rho_ * g).cwiseMax(0.0);
      Eigen::VectorXd weight(g.size());
      for (int j = 0; j < g.size(); ++j) {
        weight[j] = mu_[j] - rho_ * g[j] > 0.0 ? rho_ : 0.0;
      }
      gauss_newton += Eigen::SparseMatrix<double>(
          jac.transpose() * weight.asDiagonal() * jac);
    }
    Eigen::SparseMatrix<double> hess =
        problem_.lagrangian_hessian(z, lambda_eff, mu_eff);
    if (hess.rows() != problem_.dimension || hess.cols() != problem_.dimension) {
      throw std::invalid_argument("NlpProblem: Hessian callback size mismatch");
    }
    return hess + gauss_newton;
  }

 private:
  const NlpProblem& problem_;
  const Eigen::VectorXd& lambda_;
  const Eigen::VectorXd& mu_;
  double rho_;
  double fd_step_;
};

struct InnerResult {
  int iterations = 0;
  double projected_gradient = kInf;
};

// Projected L-BFGS on the box [lo, hi] with backtracking Armijo search along
// the projection arc. Variables held at an active bound are removed from the
// quasi-Newton direction.
InnerResult MinimizeOnBox(const AugmentedLagrangian& merit, Eigen::VectorXd& z,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          double tolerance, int max_iterations, int memory) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 40;
  const int n = static_cast<int>(z.size());

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;

  double value = merit.Value(z);
  Eigen::VectorXd grad = merit.Gradient(z);
  InnerResult result;

  Eigen::VectorXd direction(n);
  Eigen::VectorXd free_grad(n);
  std::vector<double> alpha(memory);

  for (int it = 0; it < max_iterations; ++it) {
    result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
    if (result.projected_gradient <= tolerance) break;
    result.iterations = it + 1;

    for (int i = 0; i < n; ++i) {
      const bool pinned = (z[i] <= lo[i] && grad[i] > 0.0) ||
                          (z[i] >= hi[i] && grad[i] < 0.0);
      free_grad[i] = pinned ? 0.0 : grad[i];
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      // Two-loop recursion on the free subspace.
      direction = -free_grad;
      const int m = static_cast<int>(s_hist.size());
      if (m > 0) {
        for (int j = m - 1; j >= 0; --j) {
          alpha[j] = rho_hist[j] * s_hist[j].dot(-direction);
          direction += alpha[j] * y_hist[j];
        }
        const double gamma =
            s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        direction *= gamma;
        for (int j = 0; j < m; ++j) {
          const double beta = rho_hist[j] * y_hist[j].dot(-direction);
          direction -= (alpha[j] - beta) * s_hist[j];
        }
        for (int i = 0; i < n; ++i) {
          if (free_grad[i] == 0.0 && grad[i] != 0.0) direction[i] = 0.0;
        }
      }
      double slope = grad.dot(direction);
      if (!(slope < 0.0)) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        direction = -free_grad;
        slope = grad.dot(direction);
      }

      double step = 1.0;
      if (s_hist.empty()) {
        const double dmax = direction.cwiseAbs().maxCoeff();
        if (dmax > 0.0) step = std::min(1.0, 0.1 / dmax);
      }
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        Eigen::VectorXd trial = (z + step * direction).cwiseMax(lo).cwiseMin(hi);
        const double trial_value = merit.Value(trial);
        const double decrease = grad.dot(trial - z);
        if (trial_value <= value + kArmijo * decrease && decrease < 0.0) {
          Eigen::VectorXd trial_grad = merit.Gradient(trial);
          Eigen::VectorXd s = trial - z;
          Eigen::VectorXd y = trial_grad - grad;
          const double sy = s.dot(y);
          if (sy > 1e-12 * s.squaredNorm() && sy > 0.0) {
            if (static_cast<int>(s_hist.size()) == memory) {
              s_hist.pop_front();
              y_hist.pop_front();
              rho_hist.pop_front();
            }
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
          }
          z = std::move(trial);
          value = trial_value;
          grad = std::move(trial_grad);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (s_hist.empty()) break;
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
      }
    }
    if (!accepted) {
      result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
      break;
    }
  }
  if (result.iterations == max_iterations) {
    result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
  }
  return result;
}

// Reduced factorization of a symmetric matrix restricted to a variable
// subset, with a diagonal shift.
class SubsetSolver {
 public:
  SubsetSolver(const Eigen::SparseMatrix<double>& matrix, double shift)
      : matrix_(matrix), shift_(shift) {}

  // Factors matrix(S, S) + shift I for S = {i : in_set[i]}. Returns false
  // unless the factorization is positive definite.
  bool Factor(const std::vector<bool>& in_set) {
    const int n = static_cast<int>(in_set.size());
    index_.assign(n, -1);
    size_ = 0;
    for (int i = 0; i < n; ++i) {
      if (in_set[i]) index_[i] = size_++;
    }
    if (size_ == 0) return true;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(matrix_.nonZeros() + size_);
    for (int col = 0; col < matrix_.outerSize(); ++col) {
      if (index_[col] < 0) continue;
      for (Eigen::SparseMatrix<double>::InnerIterator e(matrix_, col); e; ++e) {
        if (index_[e.row()] >= 0) {
          triplets.emplace_back(index_[e.row()], index_[col], e.value());
        }
      }
      triplets.emplace_back(index_[col], index_[col], shift_);
    }
    Eigen::SparseMatrix<double> reduced(size_, size_);
    reduced.setFromTriplets(triplets.begin(), triplets.end());
    ldlt_.compute(reduced);
    return ldlt_.info() == Eigen::Success && ldlt_.vectorD().minCoeff() > 0.0;
  }

  // Solves the factored subsystem; `rhs` and the result are full-length
  // vectors with zeros outside the subset.
  Eigen::VectorXd Solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(rhs.size());
    if (size_ == 0) return out;
    Eigen::VectorXd reduced(size_);
    for (int i = 0; i < rhs.size(); ++i) {
      if (index_[i] >= 0) reduced[index_[i]] = rhs[i];
    }
    const Eigen::VectorXd sol = ldlt_.solve(reduced);
    for (int i = 0; i < rhs.size(); ++i) {
      if (index_[i] >= 0) out[i] = sol[index_[i]];
    }
    return out;
  }

  double shift() const { return shift_; }
  void set_shift(double shift) { shift_ = shift; }

 private:
  const Eigen::SparseMatrix<double>& matrix_;
  double shift_;
  std::vector<int> index_;
  int size_ = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

// Approximately minimizes the model g^T s + 1/2 s^T (H + shift I) s over
// lower <= s <= upper by the primal-dual active-set method. Returns s.
Eigen::VectorXd SolveBoxModel(SubsetSolver& solver,
                              const Eigen::SparseMatrix<double>& hess,
                              const Eigen::VectorXd& grad,
                              const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper,
                              const std::vector<bool>& movable) {
  constexpr int kMaxActiveSetIterations = 25;
  const int n = static_cast<int>(grad.size());
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) {
    scale[i] = std::max(hess.coeff(i, i) + solver.shift(), 1e-12);
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd dual = grad;  // (H + shift I) s + g at s = 0
  std::vector<signed char> state(n, 0), previous(n, 2);
  std::vector<bool> free(n);
  Eigen::VectorXd best = s;
  for (int it = 0; it < kMaxActiveSetIterations; ++it) {
    for (int i = 0; i < n; ++i) {
      if (!movable[i]) {
        state[i] = 0;
        free[i] = false;
        continue;
      }
      if (dual[i] - scale[i] * (s[i] - lower[i]) > 0.0) {
        state[i] = -1;
      } else if (dual[i] - scale[i] * (s[i] - upper[i]) < 0.0) {
        state[i] = 1;
      } else {
        state[i] = 0;
      }
      free[i] = state[i] == 0;
    }
    if (state == previous) break;
    previous = state;

    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] < 0) fixed[i] = lower[i];
      if (state[i] > 0) fixed[i] = upper[i];
    }
    Eigen::VectorXd rhs = -(grad + hess * fixed);
    if (!solver.Factor(free)) break;
    s = fixed + solver.Solve(rhs);
    dual = hess * s + solver.shift() * s + grad;
    for (int i = 0; i < n; ++i) {
      if (free[i] || !movable[i]) dual[i] = 0.0;
    }
    best = s.cwiseMax(lower).cwiseMin(upper);
  }
  return best;
}

// Projected Newton on the box [lo, hi]: each step minimizes the quadratic
// model of the merit over the box (regularized until positive definite),
// followed by an Armijo backtracking search. Falls back to a projected
// gradient step when the model step is not a descent direction.
InnerResult MinimizeNewton(const AugmentedLagrangian& merit, Eigen::VectorXd& z,
                           const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                           double tolerance, int max_iterations) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 40;
  const int n = static_cast<int>(z.size());

  double value = merit.Value(z);
  Eigen::VectorXd grad = merit.Gradient(z);
  InnerResult result;
  double last_shift = 0.0;
  std::vector<bool> movable(n);
  for (int i = 0; i < n; ++i) movable[i] = lo[i] < hi[i];

  for (int it = 0; it < max_iterations; ++it) {
    result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
    if (result.projected_gradient <= tolerance) break;
    result.iterations = it + 1;

    const Eigen::SparseMatrix<double> hess = merit.Hessian(z);
    double diag_scale = 1.0;
    for (int i = 0; i < n; ++i) {
      diag_scale = std::max(diag_scale, std::abs(hess.coeff(i, i)));
    }
    double shift = 0.25 * last_shift;
    if (shift < 1e-10 * diag_scale) shift = 0.0;
    SubsetSolver solver(hess, shift);
    bool factored = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      solver.set_shift(shift);
      if (solver.Factor(movable)) {
        factored = true;
        break;
      }
      shift = shift == 0.0 ? 1e-8 * diag_scale : 10.0 * shift;
    }
    last_shift = shift;

    Eigen::VectorXd direction = Eigen::VectorXd::Zero(n);
    if (factored) {
      direction = SolveBoxModel(solver, hess, grad, lo - z, hi - z, movable);
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1 || !(grad.dot(direction) < 0.0)) {
        // Projected gradient fallback.
        direction = (z - grad / diag_scale).cwiseMax(lo).cwiseMin(hi) - z;
      }
      double step = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        Eigen::VectorXd trial =
            (z + step * direction).cwiseMax(lo).cwiseMin(hi);
        const double decrease = grad.dot(trial - z);
        if (!(decrease < 0.0)) break;
        const double trial_value = merit.Value(trial);
        if (trial_value <= value + kArmijo * decrease) {
          z = std::move(trial);
          value = trial_value;
          grad = merit.Gradient(z);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
      break;
    }
  }
  if (result.iterations == max_iterations) {
    result.projected_gradient = ProjectedGradientNorm(z, grad, lo, hi);
  }
  return result;
}

double Complementarity(const Eigen::VectorXd& mu, const Eigen::VectorXd& g) {
  double comp = 0.0;
  for (int j = 0; j < mu.size(); ++j) {
    comp = std::max({comp, std::abs(mu[j] * g[j]), -mu[j]});
  }
  return comp;
}

}  // namespace

const char* ToString(NlpStatus status) {
  switch (status) {
    case NlpStatus::kConverged:
      return "converged";
    case NlpStatus::kMaxIterations:
      return "max_iters";
    case NlpStatus::kInfeasible:
      return "infeasible";
    case NlpStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

Eigen::MatrixXd NumericJacobian(const VectorFn& f, const Eigen::VectorXd& point,
                                double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("NumericJacobian: step must be positive");
  }
  Eigen::VectorXd z = point;
  const Eigen::VectorXd f0 = f(z);
  if (!f0.allFinite()) {
    throw std::domain_error("NumericJacobian: non-finite evaluation");
  }
  Eigen::MatrixXd jac(f0.size(), z.size());
  for (int i = 0; i < z.size(); ++i) {
    const double orig = z[i];
    z[i] = orig + step;
    const Eigen::VectorXd fp = f(z);
    z[i] = orig - step;
    const Eigen::VectorXd fm = f(z);
    z[i] = orig;
    if (!fp.allFinite() || !fm.allFinite()) {
      throw std::domain_error("NumericJacobian: non-finite evaluation");
    }
    jac.col(i) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

Eigen::VectorXd NumericGradient(const ScalarFn& f, const Eigen::VectorXd& point,
                                double step) {
  const VectorFn wrapped = [&f](const Eigen::VectorXd& z) {
    return Eigen::VectorXd::Constant(1, f(z));
  };
  return NumericJacobian(wrapped, point, step).row(0).transpose();
}

Eigen::VectorXd EvalObjectiveGradient(const NlpProblem& problem,
                                      const Eigen::VectorXd& point,
                                      double fd_step) {
  if (problem.objective_gradient) return problem.objective_gradient(point);
  return NumericGradient(problem.objective, point, fd_step);
}

SparseMatrix EvalEqualityJacobian(const NlpProblem& problem,
                                  const Eigen::VectorXd& point,
                                  double fd_step) {
  if (problem.num_equalities == 0) {
    return SparseMatrix(0, problem.dimension);
  }
  if (problem.equality_jacobian) return problem.equality_jacobian(point);
  return NumericJacobian(problem.equality_constraints, point, fd_step)
      .sparseView();
}

SparseMatrix EvalInequalityJacobian(const NlpProblem& problem,
                                    const Eigen::VectorXd& point,
                                    double fd_step) {
  if (problem.num_inequalities == 0) {
    return SparseMatrix(0, problem.dimension);
  }
  if (problem.inequality_jacobian) return problem.inequality_jacobian(point);
  return NumericJacobian(problem.inequality_constraints, point, fd_step)
      .sparseView();
}

double ConstraintViolation(const NlpProblem& problem,
                           const Eigen::VectorXd& point) {
  return Violation(EvalEqualities(problem, point),
                   EvalInequalities(problem, point));
}

double KktResidual(const NlpProblem& problem, const Eigen::VectorXd& point,
                   const Eigen::VectorXd& multipliers) {
  ValidateProblem(problem);
  if (point.size() != problem.dimension) {
    throw std::invalid_argument("KktResidual: point has wrong dimension");
  }
  if (multipliers.size() != problem.num_equalities + problem.num_inequalities) {
    throw std::invalid_argument("KktResidual: multiplier count mismatch");
  }
  const Eigen::VectorXd lambda = multipliers.head(problem.num_equalities);
  const Eigen::VectorXd mu = multipliers.tail(problem.num_inequalities);
  Eigen::VectorXd grad = EvalObjectiveGradient(problem, point);
  if (problem.num_equalities > 0) {
    grad += EvalEqualityJacobian(problem, point).transpose() * lambda;
  }
  double comp = 0.0;
  if (problem.num_inequalities > 0) {
    grad -= EvalInequalityJacobian(problem, point).transpose() * mu;
    comp = Complementarity(mu, EvalInequalities(problem, point));
  }
  return ProjectedGradientNorm(point, grad, Lower(problem), Upper(problem)) +
         comp;
}

NlpSolution SolveNlp(const NlpProblem& problem,
                     const Eigen::VectorXd& initial_point,
                     const NlpOptions& options) {
  ValidateProblem(problem);
  if (initial_point.size() != problem.dimension) {
    throw std::invalid_argument("SolveNlp: initial point has wrong dimension");
  }
  const Eigen::VectorXd lo = Lower(problem);
  const Eigen::VectorXd hi = Upper(problem);

  NlpSolution sol;
  sol.point = initial_point.cwiseMax(lo).cwiseMin(hi);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(problem.num_equalities);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(problem.num_inequalities);
  double rho = options.initial_penalty;
  double inner_tol = std::max(0.1 * options.tol_kkt, 1e-2);
  double best_violation = kInf;
  int stalled = 0;

  try {
    Eigen::VectorXd h = EvalEqualities(problem, sol.point);
    Eigen::VectorXd g = EvalInequalities(problem, sol.point);
    CheckFinite(h);
    CheckFinite(g);
    double previous_violation = Violation(h, g);

    for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
      const AugmentedLagrangian merit(problem, lambda, mu, rho,
                                      options.finite_difference_step);
      const InnerResult inner =
          problem.lagrangian_hessian
              ? MinimizeNewton(merit, sol.point, lo, hi, inner_tol,
                               options.max_inner_iterations)
              : MinimizeOnBox(merit, sol.point, lo, hi, inner_tol,
                              options.max_inner_iterations,
                              options.lbfgs_memory);
      sol.inner_iterations += inner.iterations;
      sol.iterations = outer + 1;

      h = EvalEqualities(problem, sol.point);
      g = EvalInequalities(problem, sol.point);
      CheckFinite(h);
      CheckFinite(g);
      const double violation = Violation(h, g);

      lambda += rho * h;
      lambda = lambda.cwiseMax(-1e12).cwiseMin(1e12);
      mu = (mu - rho * g).cwiseMax(0.0).cwiseMin(1e12);

      Eigen::VectorXd multipliers(lambda.size() + mu.size());
      multipliers << lambda, mu;
      const double kkt = KktResidual(problem, sol.point, multipliers);
      const double objective = problem.objective(sol.point);
      CheckFinite(objective);
      sol.history.push_back({objective, violation, kkt, rho, inner.iterations});

      sol.objective_value = objective;
      sol.constraint_violation = violation;
      sol.kkt_residual = kkt;
      if (violation <= options.tol_feas && kkt <= options.tol_kkt) {
        sol.status = NlpStatus::kConverged;
        break;
      }

      if (violation > options.tol_feas &&
          violation > options.required_violation_decrease * previous_violation) {
        rho = std::min(rho * options.penalty_growth, options.max_penalty);
      }
      if (violation > options.tol_feas && rho >= options.max_penalty &&
          violation > 0.99 * best_violation) {
        if (++stalled >= options.infeasible_stall_limit) {
          sol.status = NlpStatus::kInfeasible;
          break;
        }
      } else {
        stalled = 0;
      }
      best_violation = std::min(best_violation, violation);
      previous_violation = violation;
      inner_tol = std::max(0.1 * options.tol_kkt, 0.1 * inner_tol);
    }
  } catch (const NonFiniteError&) {
    sol.status = NlpStatus::kNumericalFailure;
  } catch (const std::domain_error&) {
    sol.status = NlpStatus::kNumericalFailure;
  }

  sol.equality_multipliers = lambda;
  sol.inequality_multipliers = mu;
  return sol;
}

}  // namespace nlp
}  // namespace quadcrawl
