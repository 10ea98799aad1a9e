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

#include "quadcrawl/distance.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/AutoDiff>

namespace quadcrawl {
namespace {

using AutoDiff = Eigen::AutoDiffScalar<Eigen::Vector3d>;

inline double Value(double x) { return x; }
inline double Value(const AutoDiff& x) { return x.value(); }

// C1 upper approximation of max(q, 0); exact outside [-w, w].
template <typename T>
T SmoothPositivePart(const T& q, double w) {
  const double v = Value(q);
  if (v >= w) return q;
  if (v <= -w) return T(0.0) * q;
  const T shifted = q + w;
  return shifted * shifted / (4.0 * w);
}

// C1 upper approximation of max(a, b); exact when |a - b| >= w.
template <typename T>
T SmoothMax(const T& a, const T& b, double w) {
  const T diff = a - b;
  const double gap = std::abs(Value(diff));
  const T larger = Value(a) >= Value(b) ? a : b;
  if (gap >= w) return larger;
  const T slack = Value(diff) >= 0.0 ? T(w - diff) : T(w + diff);
  return larger + slack * slack / (4.0 * w);
}

template <typename T>
T SmoothMin(const T& a, const T& b, double w) {
  return -SmoothMax<T>(-a, -b, w);
}

template <typename T>
T SmoothBoxDistance(const Eigen::Matrix<T, 3, 1>& p, const BoxObstacle& box,
                    double w) {
  using std::abs;
  using std::sqrt;
  const Eigen::Vector3d c = box.center();
  const Eigen::Vector3d h = box.half_extent();
  T q[3];
  for (int i = 0; i < 3; ++i) q[i] = abs(p[i] - c[i]) - h[i];

  T sum_sq = T(0.0) * q[0];
  for (int i = 0; i < 3; ++i) {
    const T r = SmoothPositivePart(q[i], w);
    sum_sq += r * r;
  }
  const T outside = Value(sum_sq) > 0.0 ? T(sqrt(sum_sq)) : sum_sq;
  const T deepest = SmoothMax(SmoothMax(q[0], q[1], w), q[2], w);
  const T inside = -SmoothPositivePart(T(-deepest), w);
  return outside + inside;
}

}  // namespace

double SignedDistance(const Eigen::Vector3d& point, const BoxObstacle& box) {
  const Eigen::Vector3d q =
      (point - box.center()).cwiseAbs() - box.half_extent();
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double SignedDistance(const Eigen::Vector3d& point, const World& world) {
  if (!point.allFinite()) {
    throw std::invalid_argument("SignedDistance: non-finite point");
  }
  double best = kNoObstacleDistance;
  for (const BoxObstacle& box : world.obstacles) {
    best = std::min(best, SignedDistance(point, box));
  }
  return best;
}

DistanceAndGradient SmoothSignedDistance(const Eigen::Vector3d& point,
                                         const World& world, double smoothing) {
  if (!(smoothing > 0.0)) {
    throw std::invalid_argument("SmoothSignedDistance: smoothing must be > 0");
  }
  if (!point.allFinite()) {
    throw std::invalid_argument("SmoothSignedDistance: non-finite point");
  }
  DistanceAndGradient out;
  if (world.obstacles.empty()) return out;

  const double w = 0.5 * smoothing;
  Eigen::Matrix<AutoDiff, 3, 1> p;
  for (int i = 0; i < 3; ++i) {
    p[i] = AutoDiff(point[i], Eigen::Vector3d::Unit(i));
  }
  AutoDiff best = SmoothBoxDistance<AutoDiff>(p, world.obstacles[0], w);
  for (size_t k = 1; k < world.obstacles.size(); ++k) {
    best = SmoothMin<AutoDiff>(
        best, SmoothBoxDistance<AutoDiff>(p, world.obstacles[k], w), w);
  }
  out.value = best.value();
  out.gradient = best.derivatives();
  return out;
}

Eigen::Matrix3d SmoothSignedDistanceHessian(const Eigen::Vector3d& point,
                                            const World& world,
                                            double smoothing, double step) {
  Eigen::Matrix3d hess;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d e = step * Eigen::Vector3d::Unit(i);
    hess.col(i) = (SmoothSignedDistance(point + e, world, smoothing).gradient -
                   SmoothSignedDistance(point - e, world, smoothing).gradient) /
                  (2.0 * step);
  }
  return 0.5 * (hess + hess.transpose());
}

}  // namespace quadcrawl
