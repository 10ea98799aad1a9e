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

#include "quadcrawl/mlp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace quadcrawl {
namespace {

constexpr int kModelFormatVersion = 1;

using Json = nlohmann::json;

Eigen::MatrixXd NormalizeColumns(const std::vector<VelocitySample>& batch,
                                 const Normalization& norm, bool targets) {
  Eigen::MatrixXd out(4, batch.size());
  for (size_t j = 0; j < batch.size(); ++j) {
    const Eigen::Vector4d& v = targets ? batch[j].target : batch[j].input;
    out.col(j) = (v - norm.mean).cwiseQuotient(norm.scale);
  }
  return out;
}

Json VectorToJson(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd VectorFromJson(const Json& j, int expected,
                               const std::string& what) {
  const std::vector<double> values = j.get<std::vector<double>>();
  if (expected >= 0 && static_cast<int>(values.size()) != expected) {
    throw std::runtime_error("model file: '" + what + "' has " +
                             std::to_string(values.size()) + " entries, " +
                             "expected " + std::to_string(expected));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

}  // namespace

MlpModel MlpModel::Create(const std::vector<int>& hidden_sizes, uint64_t seed) {
  MlpModel model;
  model.layer_sizes_.push_back(4);
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("MlpModel: hidden size must be >= 1");
    model.layer_sizes_.push_back(h);
  }
  model.layer_sizes_.push_back(4);
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < model.layer_sizes_.size(); ++l) {
    const int fan_in = model.layer_sizes_[l];
    const int fan_out = model.layer_sizes_[l + 1];
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> init(-limit, limit);
    Eigen::MatrixXd w(fan_out, fan_in);
    // Explicit loop order keeps the draw sequence independent of Eigen.
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < fan_out; ++r) w(r, c) = init(rng);
    }
    model.weights_.push_back(std::move(w));
    model.biases_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

void MlpModel::Validate() const {
  if (layer_sizes_.size() < 2 || layer_sizes_.front() != 4 ||
      layer_sizes_.back() != 4) {
    throw std::invalid_argument("MlpModel: layers must run from 4 to 4");
  }
  if (weights_.size() + 1 != layer_sizes_.size() ||
      biases_.size() != weights_.size()) {
    throw std::invalid_argument("MlpModel: layer count mismatch");
  }
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != layer_sizes_[l + 1] ||
        weights_[l].cols() != layer_sizes_[l] ||
        biases_[l].size() != layer_sizes_[l + 1]) {
      throw std::invalid_argument("MlpModel: shape mismatch in layer " +
                                  std::to_string(l));
    }
  }
  if (!(input_range_.lower.array() <= input_range_.upper.array()).all()) {
    throw std::invalid_argument("MlpModel: input range lower > upper");
  }
  for (const Normalization* n : {&input_norm_, &output_norm_}) {
    if (!(n->scale.array() > 0.0).all() || !n->mean.allFinite() ||
        !n->scale.allFinite()) {
      throw std::invalid_argument("MlpModel: normalization scales must be > 0");
    }
  }
}

Eigen::MatrixXd MlpModel::ForwardNormalized(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != 4) {
    throw std::invalid_argument("MlpModel: inputs must have 4 rows");
  }
  Eigen::MatrixXd a = inputs;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    a = (l + 1 < num_layers()) ? Eigen::MatrixXd(z.array().tanh()) : z;
  }
  return a;
}

Eigen::Vector4d MlpModel::Forward(const Eigen::Vector4d& input) const {
  Validate();
  const Eigen::Vector4d x =
      (input - input_norm_.mean).cwiseQuotient(input_norm_.scale);
  const Eigen::Vector4d y = ForwardNormalized(x);
  return output_norm_.mean + output_norm_.scale.cwiseProduct(y);
}

int MlpModel::num_parameters() const {
  int count = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    count += static_cast<int>(weights_[l].size() + biases_[l].size());
  }
  return count;
}

Eigen::VectorXd MlpModel::Parameters() const {
  Eigen::VectorXd params(num_parameters());
  int offset = 0;
  for (const Eigen::MatrixXd& w : weights_) {
    params.segment(offset, w.size()) =
        Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    offset += static_cast<int>(w.size());
  }
  for (const Eigen::VectorXd& b : biases_) {
    params.segment(offset, b.size()) = b;
    offset += static_cast<int>(b.size());
  }
  return params;
}

void MlpModel::SetParameters(const Eigen::VectorXd& params) {
  if (params.size() != num_parameters()) {
    throw std::invalid_argument("MlpModel: parameter count mismatch");
  }
  int offset = 0;
  for (Eigen::MatrixXd& w : weights_) {
    Eigen::Map<Eigen::VectorXd>(w.data(), w.size()) =
        params.segment(offset, w.size());
    offset += static_cast<int>(w.size());
  }
  for (Eigen::VectorXd& b : biases_) {
    b = params.segment(offset, b.size());
    offset += static_cast<int>(b.size());
  }
}

std::string MlpModel::ToJson(const std::string& config_hash) const {
  Validate();
  Json j;
  j["format_version"] = kModelFormatVersion;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  j["layer_sizes"] = layer_sizes_;
  j["weights_row_major"] = Json::array();
  j["biases"] = Json::array();
  for (size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        row_major = weights_[l];
    j["weights_row_major"].push_back(std::vector<double>(
        row_major.data(), row_major.data() + row_major.size()));
    j["biases"].push_back(VectorToJson(biases_[l]));
  }
  j["input_mean"] = VectorToJson(input_norm_.mean);
  j["input_scale"] = VectorToJson(input_norm_.scale);
  j["output_mean"] = VectorToJson(output_norm_.mean);
  j["output_scale"] = VectorToJson(output_norm_.scale);
  if (input_range_.lower.allFinite() && input_range_.upper.allFinite()) {
    j["input_lower"] = VectorToJson(input_range_.lower);
    j["input_upper"] = VectorToJson(input_range_.upper);
  }
  return j.dump(1) + "\n";
}

MlpModel MlpModel::FromJson(const std::string& text) {
  MlpModel model;
  try {
    const Json j = Json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw std::runtime_error("unsupported format_version " +
                               std::to_string(version));
    }
    model.layer_sizes_ = j.at("layer_sizes").get<std::vector<int>>();
    const Json& weights = j.at("weights_row_major");
    const Json& biases = j.at("biases");
    if (model.layer_sizes_.size() < 2 ||
        weights.size() + 1 != model.layer_sizes_.size() ||
        biases.size() != weights.size()) {
      throw std::runtime_error("layer count mismatch");
    }
    for (size_t l = 0; l < weights.size(); ++l) {
      const int rows = model.layer_sizes_[l + 1];
      const int cols = model.layer_sizes_[l];
      const Eigen::VectorXd flat = VectorFromJson(
          weights[l], rows * cols, "weights_row_major[" + std::to_string(l) + "]");
      model.weights_.push_back(
          Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>(flat.data(), rows,
                                                           cols));
      model.biases_.push_back(
          VectorFromJson(biases[l], rows, "biases[" + std::to_string(l) + "]"));
    }
    model.input_norm_.mean = VectorFromJson(j.at("input_mean"), 4, "input_mean");
    model.input_norm_.scale =
        VectorFromJson(j.at("input_scale"), 4, "input_scale");
    model.output_norm_.mean =
        VectorFromJson(j.at("output_mean"), 4, "output_mean");
    model.output_norm_.scale =
        VectorFromJson(j.at("output_scale"), 4, "output_scale");
    if (j.contains("input_lower") || j.contains("input_upper")) {
      model.input_range_.lower =
          VectorFromJson(j.at("input_lower"), 4, "input_lower");
      model.input_range_.upper =
          VectorFromJson(j.at("input_upper"), 4, "input_upper");
    }
    model.Validate();
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
  return model;
}

double LossAndGradient(const MlpModel& model,
                       const std::vector<VelocitySample>& batch,
                       Eigen::VectorXd* gradient) {
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  model.Validate();
  const int num_layers = model.num_layers();
  const double count = static_cast<double>(batch.size());
  const Eigen::MatrixXd x =
      NormalizeColumns(batch, model.input_normalization(), false);
  const Eigen::MatrixXd t =
      NormalizeColumns(batch, model.output_normalization(), true);

  // activations[l] feeds layer l.
  std::vector<Eigen::MatrixXd> activations{x};
  for (int l = 0; l < num_layers; ++l) {
    Eigen::MatrixXd z = model.weights()[l] * activations.back();
    z.colwise() += model.biases()[l];
    if (l + 1 < num_layers) z = z.array().tanh();
    activations.push_back(std::move(z));
  }
  const Eigen::MatrixXd error = activations.back() - t;
  const double loss = error.squaredNorm() / (4.0 * count);
  if (gradient == nullptr) return loss;

  gradient->resize(model.num_parameters());
  std::vector<int> weight_offset(num_layers);
  std::vector<int> bias_offset(num_layers);
  int offset = 0;
  for (int l = 0; l < num_layers; ++l) {
    weight_offset[l] = offset;
    offset += static_cast<int>(model.weights()[l].size());
  }
  for (int l = 0; l < num_layers; ++l) {
    bias_offset[l] = offset;
    offset += static_cast<int>(model.biases()[l].size());
  }

  Eigen::MatrixXd delta = error * (2.0 / (4.0 * count));
  for (int l = num_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd grad_w = delta * activations[l].transpose();
    gradient->segment(weight_offset[l], grad_w.size()) =
        Eigen::Map<const Eigen::VectorXd>(grad_w.data(), grad_w.size());
    gradient->segment(bias_offset[l], delta.rows()) = delta.rowwise().sum();
    if (l > 0) {
      delta = (model.weights()[l].transpose() * delta).array() *
              (1.0 - activations[l].array().square());
    }
  }
  return loss;
}

double Loss(const MlpModel& model, const std::vector<VelocitySample>& batch) {
  return LossAndGradient(model, batch, nullptr);
}

TrainConfig TrainConfig::Desk() {
  TrainConfig config;
  config.learning_rate = 0.2;
  config.schedule = LrSchedule::kDecay;
  config.decay = 0.85;
  return config;
}

void TrainConfig::Validate() const {
  for (int h : hidden_sizes) {
    if (h < 1) throw std::invalid_argument("train: hidden sizes must be >= 1");
  }
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("train: learning_rate must be > 0");
  }
  if (!(decay > 0.0)) throw std::invalid_argument("train: decay must be > 0");
  double sum = 0.0;
  for (double f : split) {
    if (!(f >= 0.0)) throw std::invalid_argument("train: split fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("train: split fractions must sum to 1");
  }
}

TrajectorySplit SplitTrajectories(int num_trajectories,
                                  const std::array<double, 3>& fractions,
                                  uint64_t seed) {
  if (num_trajectories < 3) {
    throw std::invalid_argument("split: need at least 3 trajectories, got " +
                                std::to_string(num_trajectories));
  }
  std::vector<int> ids(num_trajectories);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit index draw so the permutation does not
  // depend on the standard library's shuffle.
  for (int i = num_trajectories - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
    std::swap(ids[i], ids[j]);
  }
  int n_val = static_cast<int>(std::lround(fractions[1] * num_trajectories));
  int n_test = static_cast<int>(std::lround(fractions[2] * num_trajectories));
  if (fractions[1] > 0.0) n_val = std::max(n_val, 1);
  if (fractions[2] > 0.0) n_test = std::max(n_test, 1);
  const int n_train = num_trajectories - n_val - n_test;
  if (n_train < 1) throw std::invalid_argument("split: empty training split");

  TrajectorySplit split;
  split.train.assign(ids.begin(), ids.begin() + n_train);
  split.val.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  split.test.assign(ids.begin() + n_train + n_val, ids.end());
  for (std::vector<int>* part : {&split.train, &split.val, &split.test}) {
    std::sort(part->begin(), part->end());
  }
  return split;
}

Normalization FitNormalization(const std::vector<Eigen::Vector4d>& values) {
  Normalization norm;
  if (values.empty()) return norm;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (const Eigen::Vector4d& v : values) sum += v;
  norm.mean = sum / static_cast<double>(values.size());
  Eigen::Vector4d sq = Eigen::Vector4d::Zero();
  for (const Eigen::Vector4d& v : values) {
    sq += (v - norm.mean).cwiseAbs2();
  }
  for (int i = 0; i < 4; ++i) {
    const double sd = std::sqrt(sq[i] / static_cast<double>(values.size()));
    norm.scale[i] = sd > 1e-12 ? sd : 1.0;
  }
  return norm;
}

TrainResult Train(const Dataset& dataset, const TrainConfig& config) {
  config.Validate();
  if (dataset.records.empty()) throw std::invalid_argument("train: empty dataset");

  TrainResult result;
  result.split = SplitTrajectories(dataset.num_trajectories(), config.split,
                                   config.seed);
  std::vector<int> part(dataset.num_trajectories(), 0);
  for (int id : result.split.val) part[id] = 1;
  for (int id : result.split.test) part[id] = 2;
  std::vector<VelocitySample> train, val, test;
  for (const DatasetRecord& r : dataset.records) {
    const VelocitySample s{r.pose, r.velocity};
    (part[r.trajectory_id] == 0 ? train
     : part[r.trajectory_id] == 1 ? val
                                  : test)
        .push_back(s);
  }
  if (train.empty()) throw std::invalid_argument("train: empty training split");

  MlpModel model = MlpModel::Create(config.hidden_sizes, config.seed);
  std::vector<Eigen::Vector4d> inputs, targets;
  for (const VelocitySample& s : train) {
    inputs.push_back(s.input);
    targets.push_back(s.target);
  }
  model.input_normalization() = FitNormalization(inputs);
  model.output_normalization() = FitNormalization(targets);
  model.input_range() = {inputs.front(), inputs.front()};
  for (const Eigen::Vector4d& x : inputs) {
    model.input_range().lower = model.input_range().lower.cwiseMin(x);
    model.input_range().upper = model.input_range().upper.cwiseMax(x);
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd params = model.Parameters();
  Eigen::VectorXd gradient;
  std::vector<VelocitySample> batch;
  result.best_val_mse = std::numeric_limits<double>::infinity();
  result.model = model;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr =
        config.schedule == LrSchedule::kDecay
            ? config.learning_rate * std::pow(config.decay, epoch - 1)
            : config.learning_rate;
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    double loss_sum = 0.0;
    int batches = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (size_t k = start; k < stop; ++k) batch.push_back(train[order[k]]);
      const double loss = LossAndGradient(model, batch, &gradient);
      if (!std::isfinite(loss) || !gradient.allFinite()) {
        std::ostringstream msg;
        msg << "train: diverged (non-finite loss) at epoch " << epoch
            << ", batch " << batches + 1;
        throw std::runtime_error(msg.str());
      }
      params -= lr * gradient;
      model.SetParameters(params);
      loss_sum += loss;
      ++batches;
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_mse = loss_sum / batches;
    record.val_mse = val.empty() ? record.train_mse : Loss(model, val);
    if (!std::isfinite(record.val_mse)) {
      throw std::runtime_error("train: diverged (non-finite validation loss) "
                               "at epoch " + std::to_string(epoch));
    }
    result.history.push_back(record);
    if (record.val_mse < result.best_val_mse) {
      result.best_val_mse = record.val_mse;
      result.best_epoch = epoch;
      result.model = model;
    }
  }

  if (!test.empty()) {
    result.test_mse = Loss(result.model, test);
    double raw = 0.0;
    for (const VelocitySample& s : test) {
      raw += (result.model.Forward(s.input) - s.target).squaredNorm();
    }
    result.test_mse_raw = raw / (4.0 * test.size());
  }
  return result;
}

Eigen::Vector4d PredictVelocity(const MlpModel& model, const TorsoPose& pose,
                                const World& world) {
  Eigen::Vector4d input = pose.AsVector();
  input[3] = NormalizeYaw(input[3]);
  input = input.cwiseMax(model.input_range().lower)
              .cwiseMin(model.input_range().upper);
  const Eigen::Vector4d v = model.Forward(input);
  return v.cwiseMax(world.velocity_lower()).cwiseMin(world.velocity_upper());
}

}  // namespace quadcrawl
