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

#ifndef QUADCRAWL_DISTANCE_H_
#define QUADCRAWL_DISTANCE_H_

#include <Eigen/Core>

#include "quadcrawl/types.h"

namespace quadcrawl {

// Returned by the distance queries when the world has no obstacles.
inline constexpr double kNoObstacleDistance = 1e6;

// Exact Euclidean signed distance from `point` to the surface of `box`;
// negative inside (minus the distance to the nearest face).
double SignedDistance(const Eigen::Vector3d& point, const BoxObstacle& box);

// Minimum of the per-box signed distances.
double SignedDistance(const Eigen::Vector3d& point, const World& world);

struct DistanceAndGradient {
  double value = kNoObstacleDistance;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

// C1 surrogate of SignedDistance. The kinks of the exact function (interior
// medial planes, the min over boxes) are replaced by quadratic blends of
// width `smoothing`/2, so the surrogate is exact wherever no two candidate
// terms are within that width of each other, and deviates from the exact
// distance by less than `smoothing` everywhere. Throws std::invalid_argument
// if smoothing <= 0.
DistanceAndGradient SmoothSignedDistance(const Eigen::Vector3d& point,
                                         const World& world, double smoothing);

// Hessian of the surrogate by central differences of its gradient,
// symmetrized. Piecewise smooth: jumps across the blend boundaries.
Eigen::Matrix3d SmoothSignedDistanceHessian(const Eigen::Vector3d& point,
                                            const World& world,
                                            double smoothing,
                                            double step = 1e-6);

}  // namespace quadcrawl

#endif  // QUADCRAWL_DISTANCE_H_
