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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace quadcrawl {
namespace {

World SlabWorld() {
  World world = World::Default();
  world.obstacles.push_back({"slab", {1.3, -1.0, 0.23}, {1.7, 1.0, 0.25}});
  return world;
}

TEST(SignedDistanceTest, Examples) {
  const World world = SlabWorld();
  EXPECT_NEAR(SignedDistance(Eigen::Vector3d(0.0, 0.0, 0.28), world),
              std::sqrt(1.3 * 1.3 + 0.03 * 0.03), 1e-12);
  EXPECT_NEAR(SignedDistance(Eigen::Vector3d(1.5, 0.0, 0.24), world), -0.01,
              1e-12);
  EXPECT_EQ(SignedDistance(Eigen::Vector3d(1.3, 0.2, 0.24), world), 0.0);
  EXPECT_NEAR(SignedDistance(Eigen::Vector3d(1.5, 0.0, 0.25), world), 0.0,
              1e-15);
}

TEST(SignedDistanceTest, EmptyWorldSentinel) {
  EXPECT_EQ(SignedDistance(Eigen::Vector3d::Zero(), World::Default()),
            kNoObstacleDistance);
}

TEST(SignedDistanceTest, MinimumOverObstacles) {
  World world = SlabWorld();
  world.obstacles.push_back({"post", {0.5, -0.1, 0.0}, {0.6, 0.1, 1.0}});
  EXPECT_NEAR(SignedDistance(Eigen::Vector3d(0.0, 0.0, 0.28), world), 0.5,
              1e-12);
}

TEST(SignedDistanceTest, RejectsNonFinite) {
  EXPECT_THROW(SignedDistance(Eigen::Vector3d(NAN, 0.0, 0.0), SlabWorld()),
               std::invalid_argument);
}

TEST(SmoothSignedDistanceTest, FarFieldMatchesExact) {
  const World world = SlabWorld();
  const Eigen::Vector3d p(0.0, 0.3, 0.28);
  EXPECT_NEAR(SmoothSignedDistance(p, world, 0.01).value,
              SignedDistance(p, world), 1e-6);
}

TEST(SmoothSignedDistanceTest, WithinSmoothingAndConservative) {
  World world = SlabWorld();
  world.obstacles.push_back({"post", {0.5, -0.1, 0.0}, {0.6, 0.1, 1.0}});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-0.5, 2.5), uy(-1.5, 1.5),
      uz(0.0, 0.6);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d p(ux(rng), uy(rng), uz(rng));
    const double exact = SignedDistance(p, world);
    const double smooth = SmoothSignedDistance(p, world, 0.01).value;
    EXPECT_LE(std::abs(smooth - exact), 0.01) << p.transpose();
    EXPECT_LE(smooth, exact + 0.01) << p.transpose();
  }
}

TEST(SmoothSignedDistanceTest, ZeroSmoothingLimit) {
  const World world = SlabWorld();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(0.8, 2.2), uy(-1.5, 1.5),
      uz(0.0, 0.5);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d p(ux(rng), uy(rng), uz(rng));
    EXPECT_NEAR(SmoothSignedDistance(p, world, 1e-5).value,
                SignedDistance(p, world), 1e-3);
  }
}

TEST(SmoothSignedDistanceTest, GradientMatchesFiniteDifferences) {
  World world = SlabWorld();
  world.obstacles.push_back({"post", {0.5, -0.1, 0.0}, {0.6, 0.1, 1.0}});
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(0.0, 2.5), uy(-1.5, 1.5),
      uz(0.05, 0.6);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 100) {
    const Eigen::Vector3d p(ux(rng), uy(rng), uz(rng));
    const DistanceAndGradient d = SmoothSignedDistance(p, world, 0.01);
    Eigen::Vector3d fd;
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3d e = h * Eigen::Vector3d::Unit(j);
      fd[j] = (SmoothSignedDistance(p + e, world, 0.01).value -
               SmoothSignedDistance(p - e, world, 0.01).value) /
              (2.0 * h);
    }
    if (fd.norm() < 1e-3) continue;  // skip points where the field is flat
    EXPECT_LE((d.gradient - fd).norm() / fd.norm(), 1e-4) << p.transpose();
    ++checked;
  }
}

TEST(SmoothSignedDistanceTest, RejectsNonPositiveSmoothing) {
  EXPECT_THROW(SmoothSignedDistance(Eigen::Vector3d::Zero(), SlabWorld(), 0.0),
               std::invalid_argument);
}

}  // namespace
}  // namespace quadcrawl
