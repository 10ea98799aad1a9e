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

#include <benchmark/benchmark.h>

#include "quadcrawl/distance.h"
#include "quadcrawl/planner.h"
#include "quadcrawl/scenario.h"

namespace quadcrawl {
namespace {

void BM_PlanTable(benchmark::State& state) {
  Scenario scenario = Scenario::Default();
  scenario.planner.knot_count = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const PlanReport report = Plan(scenario.start, scenario.goal,
                                   scenario.world, scenario.planner);
    benchmark::DoNotOptimize(report.trajectory.total_time);
  }
}
BENCHMARK(BM_PlanTable)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PlanTable2d(benchmark::State& state) {
  const Scenario scenario = Scenario::Default();
  for (auto _ : state) {
    const PlanReport report = Plan2d(scenario.start, scenario.goal,
                                     scenario.world, scenario.planner);
    benchmark::DoNotOptimize(report.trajectory.total_time);
  }
}
BENCHMARK(BM_PlanTable2d)->Unit(benchmark::kMillisecond);

void BM_SmoothSignedDistance(benchmark::State& state) {
  const World world = Scenario::Default().world;
  Eigen::Vector3d p(1.2, 0.1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(SmoothSignedDistance(p, world, 0.01));
    p.x() += 1e-9;
  }
}
BENCHMARK(BM_SmoothSignedDistance);

}  // namespace
}  // namespace quadcrawl

BENCHMARK_MAIN();
