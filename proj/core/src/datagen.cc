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

#include "quadcrawl/datagen.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "quadcrawl/distance.h"
#include "quadcrawl/text_io.h"

namespace quadcrawl {

namespace {

constexpr int kMaxDrawsPerPose = 100;

}  // namespace

void InitialPoseDistribution::Validate() const {
  if (!mean.allFinite() || !stddev.allFinite() || !std::isfinite(fixed_z)) {
    throw std::invalid_argument("pose distribution: non-finite entry");
  }
  if ((stddev.array() < 0.0).any()) {
    throw std::invalid_argument("pose distribution: stddev must be >= 0");
  }
  if (!(fixed_z > 0.0)) {
    throw std::invalid_argument("pose distribution: fixed_z must be > 0");
  }
}

double SamplingClearance(const World& world, const PlannerConfig& config) {
  return world.clearance + config.clearance_margin + config.smoothing;
}

std::vector<TorsoPose> SampleInitialPoses(
    const InitialPoseDistribution& distribution, int count, const World& world,
    uint64_t seed, double min_clearance) {
  distribution.Validate();
  if (count < 0) throw std::invalid_argument("SampleInitialPoses: count < 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<TorsoPose> poses;
  poses.reserve(count);
  for (int i = 0; i < count; ++i) {
    bool accepted = false;
    for (int draw = 0; draw < kMaxDrawsPerPose && !accepted; ++draw) {
      TorsoPose pose;
      pose.x = distribution.mean[0] + distribution.stddev[0] * unit(rng);
      pose.y = distribution.mean[1] + distribution.stddev[1] * unit(rng);
      pose.yaw = distribution.mean[2] + distribution.stddev[2] * unit(rng);
      pose.z = distribution.fixed_z;
      pose.x = std::clamp(pose.x, world.state_lower[0], world.state_upper[0]);
      pose.y = std::clamp(pose.y, world.state_lower[1], world.state_upper[1]);
      pose.z = std::clamp(pose.z, world.state_lower[2], world.state_upper[2]);
      pose.yaw = NormalizeYaw(
          std::clamp(pose.yaw, world.state_lower[3], world.state_upper[3]));
      if (SignedDistance(pose.Position(), world) >= min_clearance) {
        poses.push_back(pose);
        accepted = true;
      }
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "pose sampling: " << kMaxDrawsPerPose
          << " consecutive draws were within " << min_clearance
          << " m of an obstacle; the distribution is inconsistent with the "
             "world";
      throw std::runtime_error(msg.str());
    }
  }
  return poses;
}

std::vector<TrajectorySample> ResampleTrajectory(const TorsoTrajectory& traj,
                                                 int points) {
  if (points < 2) {
    throw std::invalid_argument("ResampleTrajectory: points must be >= 2");
  }
  if (traj.knots.empty()) {
    throw std::invalid_argument("ResampleTrajectory: empty trajectory");
  }
  std::vector<TrajectorySample> out(points);
  const TrajectoryKnot& first = traj.knots.front();
  if (!(traj.total_time > 0.0) || traj.knots.size() < 2) {
    for (TrajectorySample& s : out) {
      s.pose = first.state.pose;
      s.velocity = first.state.twist;
    }
    return out;
  }
  const int n = traj.num_intervals();
  const double h = traj.total_time / n;
  for (int j = 0; j < points; ++j) {
    TrajectorySample& s = out[j];
    if (j == points - 1) {
      s.time = traj.total_time;
      s.pose = traj.knots.back().state.pose;
      s.velocity = traj.knots.back().state.twist;
      continue;
    }
    s.time = traj.total_time * j / (points - 1);
    const int k = std::min(static_cast<int>(s.time / h), n - 1);
    const TrajectoryKnot& a = traj.knots[k];
    const TrajectoryKnot& b = traj.knots[k + 1];
    const double w = (s.time - a.time) / (b.time - a.time);
    Eigen::Vector4d pa = a.state.pose.AsVector();
    Eigen::Vector4d pb = b.state.pose.AsVector();
    pb[3] = pa[3] + NormalizeYaw(pb[3] - pa[3]);
    Eigen::Vector4d pose = (1.0 - w) * pa + w * pb;
    pose[3] = NormalizeYaw(pose[3]);
    s.pose = TorsoPose::FromVector(pose);
    s.velocity = (1.0 - w) * a.state.twist + w * b.state.twist;
  }
  return out;
}

int Dataset::num_trajectories() const {
  int count = 0;
  for (const DatasetRecord& r : records) {
    count = std::max(count, r.trajectory_id + 1);
  }
  return count;
}

std::vector<VelocitySample> Dataset::Samples() const {
  std::vector<VelocitySample> samples;
  samples.reserve(records.size());
  for (const DatasetRecord& r : records) samples.push_back({r.pose, r.velocity});
  return samples;
}

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  out << "# config_hash=" << dataset.config_hash << "\n";
  out << kDatasetHeader << "\n";
  for (const DatasetRecord& r : dataset.records) {
    out << r.trajectory_id << ',' << r.knot << ',' << FormatDouble(r.time);
    for (int i = 0; i < 4; ++i) out << ',' << FormatDouble(r.pose[i]);
    for (int i = 0; i < 4; ++i) out << ',' << FormatDouble(r.velocity[i]);
    out << '\n';
  }
}

Dataset ReadDataset(std::istream& in) {
  Dataset dataset;
  std::string line;
  int line_number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (line.rfind(key, 0) == 0) dataset.config_hash = line.substr(key.size());
      continue;
    }
    if (!header_seen) {
      if (line != kDatasetHeader) {
        throw std::runtime_error("dataset line " + std::to_string(line_number) +
                                 ": expected header '" + kDatasetHeader + "'");
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = SplitCsvLine(line);
    if (fields.size() != 11) {
      throw std::runtime_error("dataset line " + std::to_string(line_number) +
                               ": expected 11 fields");
    }
    try {
      DatasetRecord r;
      r.trajectory_id = std::stoi(fields[0]);
      r.knot = std::stoi(fields[1]);
      r.time = ParseDouble(fields[2]);
      for (int i = 0; i < 4; ++i) r.pose[i] = ParseDouble(fields[3 + i]);
      for (int i = 0; i < 4; ++i) r.velocity[i] = ParseDouble(fields[7 + i]);
      if (!r.pose.allFinite() || !r.velocity.allFinite() ||
          !std::isfinite(r.time) || r.trajectory_id < 0) {
        throw std::invalid_argument("non-finite or negative entry");
      }
      dataset.records.push_back(r);
    } catch (const std::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_number) +
                               ": " + e.what());
    }
  }
  if (!header_seen) throw std::runtime_error("dataset: missing header line");
  return dataset;
}

GenerationResult GenerateDataset(const GenerationRequest& request) {
  request.world.Validate();
  request.planner.Validate();
  if (request.trajectory_count < 0) {
    throw std::invalid_argument("GenerateDataset: negative trajectory count");
  }
  if (request.points_per_trajectory < 2) {
    throw std::invalid_argument("GenerateDataset: points per trajectory < 2");
  }

  GenerationResult result;
  GenerationSummary& summary = result.summary;
  summary.requested = request.trajectory_count;
  result.dataset.config_hash = request.config_hash;
  if (request.trajectory_count == 0) return result;

  // Poses are drawn sequentially so the set is independent of threading.
  summary.starts = SampleInitialPoses(
      request.distribution, request.trajectory_count, request.world,
      request.seed, SamplingClearance(request.world, request.planner));

  const int count = request.trajectory_count;
  std::vector<PlanReport> reports(count);
  std::vector<std::string> errors(count);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) {
      try {
        reports[i] = Plan(summary.starts[i], request.goal, request.world,
                          request.planner);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::clamp(request.workers, 1, count);
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  double time_sum = 0.0;
  double clearance_sum = 0.0;
  for (int i = 0; i < count; ++i) {
    if (!errors[i].empty() || !reports[i].converged()) {
      summary.failed.push_back(i);
      summary.failure_status.push_back(
          errors[i].empty() ? nlp::ToString(reports[i].solver_status)
                            : errors[i]);
      continue;
    }
    const int id = summary.succeeded++;
    summary.source_index.push_back(i);
    time_sum += reports[i].trajectory.total_time;
    clearance_sum += reports[i].min_clearance;
    const std::vector<TrajectorySample> samples = ResampleTrajectory(
        reports[i].trajectory, request.points_per_trajectory);
    for (int j = 0; j < static_cast<int>(samples.size()); ++j) {
      result.dataset.records.push_back({id, j, samples[j].time,
                                        samples[j].pose.AsVector(),
                                        samples[j].velocity});
    }
    result.reports.push_back(std::move(reports[i]));
  }
  if (summary.succeeded > 0) {
    summary.mean_total_time = time_sum / summary.succeeded;
    summary.mean_min_clearance = clearance_sum / summary.succeeded;
  }
  if (2 * summary.succeeded < count) {
    std::ostringstream msg;
    msg << "dataset generation: only " << summary.succeeded << " of " << count
        << " solves converged";
    for (size_t k = 0; k < summary.failed.size() && k < 5; ++k) {
      const TorsoPose& p = summary.starts[summary.failed[k]];
      msg << "; start (" << p.x << ", " << p.y << ", " << p.yaw
          << "): " << summary.failure_status[k];
    }
    throw std::runtime_error(msg.str());
  }
  return result;
}

}  // namespace quadcrawl
