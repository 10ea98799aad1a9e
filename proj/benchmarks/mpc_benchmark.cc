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

#include <array>
#include <vector>

#include <benchmark/benchmark.h>

#include "quadcrawl/mpc.h"
#include "quadcrawl/simulator.h"

namespace quadcrawl {
namespace {

void BM_SolveGrfMpc(benchmark::State& state) {
  const QuadrupedParams params;
  MpcConfig config;
  config.horizon = static_cast<int>(state.range(0));
  SrbState current;
  current.position = {0.0, 0.0, 0.28};
  std::array<Eigen::Vector3d, kNumLegs> feet;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    feet[leg] = params.hip_offsets[leg];
    feet[leg].z() = 0.0;
  }
  const std::vector<SrbState> reference = BuildReference(
      Eigen::Vector4d(0.3, 0.0, 0.0, 0.0), current, config);
  // Trot: diagonal pairs alternate every other step.
  std::vector<std::array<bool, kNumLegs>> stance;
  for (int k = 0; k < config.horizon; ++k) {
    const bool a = (k / 2) % 2 == 0;
    stance.push_back({a, !a, !a, a});
  }
  for (auto _ : state) {
    const MpcSolution sol =
        SolveGrfMpc(current, reference, stance, feet, params, config);
    benchmark::DoNotOptimize(sol.cost);
  }
}
BENCHMARK(BM_SolveGrfMpc)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Rollout(benchmark::State& state) {
  RolloutRequest request;
  request.start = {0.0, 0.0, 0.28, 0.0};
  request.goal = {3.0, 0.0, 0.28, 0.0};
  request.max_time = 1.0;
  const VelocityPolicy policy = [](const TorsoPose&) {
    return Eigen::Vector4d(0.3, 0.0, 0.0, 0.0);
  };
  for (auto _ : state) {
    const RolloutResult result = Rollout(policy, request);
    benchmark::DoNotOptimize(result.final_time);
  }
}
BENCHMARK(BM_Rollout)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace quadcrawl

BENCHMARK_MAIN();
