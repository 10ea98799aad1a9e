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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "quadcrawl/mlp.h"

namespace quadcrawl {
namespace {

const std::vector<int>& Architecture(int index) {
  static const std::vector<std::vector<int>> kArchitectures = {
      {64, 128, 128, 64}, {256, 1024, 1024, 1024, 1024, 256}};
  return kArchitectures[index];
}

std::vector<VelocitySample> RandomBatch(int size) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  std::vector<VelocitySample> batch(size);
  for (VelocitySample& s : batch) {
    for (int i = 0; i < 4; ++i) {
      s.input[i] = gauss(rng);
      s.target[i] = gauss(rng);
    }
  }
  return batch;
}

void BM_Forward(benchmark::State& state) {
  const MlpModel model = MlpModel::Create(Architecture(state.range(0)), 1);
  Eigen::Vector4d input(0.5, 0.1, 0.28, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.Forward(input));
    input.x() += 1e-9;
  }
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_LossAndGradient(benchmark::State& state) {
  const MlpModel model = MlpModel::Create(Architecture(state.range(0)), 1);
  const std::vector<VelocitySample> batch =
      RandomBatch(static_cast<int>(state.range(1)));
  Eigen::VectorXd grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossAndGradient(model, batch, &grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_LossAndGradient)
    ->Args({0, 32})
    ->Args({1, 32})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace quadcrawl

BENCHMARK_MAIN();
