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

// Dataset generation: sample start poses, plan a trajectory from each, and
// flatten the trajectories into (pose, velocity) samples.

#ifndef QUADCRAWL_DATAGEN_H_
#define QUADCRAWL_DATAGEN_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadcrawl/planner.h"
#include "quadcrawl/types.h"

namespace quadcrawl {

// Independent Gaussians over (x, y, yaw); z is fixed.
struct InitialPoseDistribution {
  Eigen::Vector3d mean{0.5, 0.066, 0.026};
  Eigen::Vector3d stddev{0.5, 0.66, 0.02};
  double fixed_z = 0.28;

  void Validate() const;
};

// Draws `count` poses, clamped into the world's pose bounds and redrawn
// while closer than `min_clearance` to an obstacle. Throws
// std::runtime_error if any pose needs more than 100 draws.
std::vector<TorsoPose> SampleInitialPoses(
    const InitialPoseDistribution& distribution, int count, const World& world,
    uint64_t seed, double min_clearance);

// Clearance demanded of sampled starts so that the planner's (smoothed,
// margined) collision constraint holds at the first knot.
double SamplingClearance(const World& world, const PlannerConfig& config);

struct TrajectorySample {
  double time = 0.0;
  TorsoPose pose;
  Eigen::Vector4d velocity = Eigen::Vector4d::Zero();
};

// `points` samples uniformly spaced in time, linearly interpolating the knot
// states (yaw along the shorter arc). A trajectory with total_time <= 0
// yields copies of the first knot. Throws std::invalid_argument if
// points < 2.
std::vector<TrajectorySample> ResampleTrajectory(const TorsoTrajectory& traj,
                                                 int points);

struct DatasetRecord {
  int trajectory_id = 0;
  int knot = 0;
  double time = 0.0;
  Eigen::Vector4d pose = Eigen::Vector4d::Zero();
  Eigen::Vector4d velocity = Eigen::Vector4d::Zero();
};

struct Dataset {
  std::vector<DatasetRecord> records;
  // Hash of the generating configuration, carried in the file header.
  std::string config_hash;

  // Trajectory ids are dense: 0 .. num_trajectories() - 1.
  int num_trajectories() const;
  std::vector<VelocitySample> Samples() const;
};

// Header line of the dataset file.
inline constexpr const char* kDatasetHeader =
    "traj_id,knot,t,x,y,z,yaw,vx,vy,vz,vyaw";

void WriteDataset(const Dataset& dataset, std::ostream& out);
// Throws std::runtime_error naming the offending line.
Dataset ReadDataset(std::istream& in);

struct GenerationRequest {
  World world;
  TorsoPose goal{3.0, 0.0, 0.28, 0.0};
  InitialPoseDistribution distribution;
  int trajectory_count = 200;
  int points_per_trajectory = 100;
  PlannerConfig planner;
  uint64_t seed = 1;
  int workers = 1;
  std::string config_hash;
};

struct GenerationSummary {
  int requested = 0;
  int succeeded = 0;
  double mean_total_time = 0.0;
  double mean_min_clearance = 0.0;
  // Index of the sampled pose behind each trajectory id.
  std::vector<int> source_index;
  std::vector<TorsoPose> starts;  // every sampled pose, in draw order
  std::vector<int> failed;        // pose indices whose solve did not converge
  std::vector<std::string> failure_status;
};

struct GenerationResult {
  Dataset dataset;
  GenerationSummary summary;
  // Converged plans, indexed by trajectory id.
  std::vector<PlanReport> reports;
};

// Plans from every sampled pose on `workers` threads. The output does not
// depend on the worker count. Throws std::runtime_error when fewer than half
// of the solves converge.
GenerationResult GenerateDataset(const GenerationRequest& request);

}  // namespace quadcrawl

#endif  // QUADCRAWL_DATAGEN_H_
