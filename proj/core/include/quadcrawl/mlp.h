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

// Multilayer perceptron pose -> velocity policy: tanh hidden layers, linear
// output, z-score normalization on both ends, trained with plain minibatch
// SGD on the mean squared error in normalized units.

#ifndef QUADCRAWL_MLP_H_
#define QUADCRAWL_MLP_H_

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadcrawl/datagen.h"
#include "quadcrawl/types.h"

namespace quadcrawl {

struct Normalization {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Vector4d scale = Eigen::Vector4d::Ones();
};

// Box of poses seen in training; PredictVelocity clamps queries into it so
// the network is never evaluated outside its data.
struct InputRange {
  Eigen::Vector4d lower = Eigen::Vector4d::Constant(
      -std::numeric_limits<double>::infinity());
  Eigen::Vector4d upper = Eigen::Vector4d::Constant(
      std::numeric_limits<double>::infinity());
};

class MlpModel {
 public:
  MlpModel() = default;
  // Layers [4, hidden..., 4] with weights uniform in +-1/sqrt(fan_in) and
  // zero biases; identity normalization.
  static MlpModel Create(const std::vector<int>& hidden_sizes, uint64_t seed);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  // Weights are (fan_out x fan_in).
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
  Normalization& input_normalization() { return input_norm_; }
  const Normalization& input_normalization() const { return input_norm_; }
  Normalization& output_normalization() { return output_norm_; }
  const Normalization& output_normalization() const { return output_norm_; }
  InputRange& input_range() { return input_range_; }
  const InputRange& input_range() const { return input_range_; }

  // Throws std::invalid_argument when shapes do not chain or scales <= 0.
  void Validate() const;

  // Raw pose in, raw velocity out.
  Eigen::Vector4d Forward(const Eigen::Vector4d& input) const;
  // Normalized inputs (4 x B) to normalized outputs (4 x B).
  Eigen::MatrixXd ForwardNormalized(const Eigen::MatrixXd& inputs) const;

  // All weights then all biases, layer by layer, weights column-major.
  int num_parameters() const;
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::VectorXd& params);

  // JSON text with a format version; doubles round-trip exactly. A
  // non-empty `config_hash` is stored alongside (and ignored on load).
  std::string ToJson(const std::string& config_hash = {}) const;
  // Throws std::runtime_error on malformed input.
  static MlpModel FromJson(const std::string& text);

 private:
  std::vector<int> layer_sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  Normalization input_norm_;
  Normalization output_norm_;
  InputRange input_range_;
};

// MSE over the batch and the four outputs, in normalized units, and its
// gradient flattened like MlpModel::Parameters(). Throws
// std::invalid_argument on an empty batch.
double LossAndGradient(const MlpModel& model,
                       const std::vector<VelocitySample>& batch,
                       Eigen::VectorXd* gradient);

// Same loss without the gradient.
double Loss(const MlpModel& model, const std::vector<VelocitySample>& batch);

enum class LrSchedule { kConstant, kDecay };

struct TrainConfig {
  std::vector<int> hidden_sizes{64, 128, 128, 64};
  int batch_size = 32;
  int epochs = 20;
  double learning_rate = 0.05;
  LrSchedule schedule = LrSchedule::kConstant;
  double decay = 1.0;  // per-epoch factor when schedule == kDecay
  uint64_t seed = 1;
  std::array<double, 3> split{0.8, 0.1, 0.1};  // train, val, test

  void Validate() const;

  // Step-decayed SGD tuned for the 200-trajectory dataset.
  static TrainConfig Desk();
};

struct TrajectorySplit {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

// Partitions trajectory ids 0..num_trajectories-1. Throws
// std::invalid_argument for fewer than 3 trajectories.
TrajectorySplit SplitTrajectories(int num_trajectories,
                                  const std::array<double, 3>& fractions,
                                  uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct TrainResult {
  MlpModel model;  // best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_mse = 0.0;
  double test_mse = 0.0;      // normalized units
  double test_mse_raw = 0.0;  // (m/s)^2 and (rad/s)^2
  TrajectorySplit split;
};

// Throws std::runtime_error naming the epoch and batch on divergence.
TrainResult Train(const Dataset& dataset, const TrainConfig& config);

// Normalization statistics of a sample set (scale = stddev, or 1 when the
// spread vanishes).
Normalization FitNormalization(const std::vector<Eigen::Vector4d>& values);

// Forward pass at `pose` (clamped into the model's input range), with the
// result clamped to the world's velocity bounds.
Eigen::Vector4d PredictVelocity(const MlpModel& model, const TorsoPose& pose,
                                const World& world);

}  // namespace quadcrawl

#endif  // QUADCRAWL_MLP_H_
