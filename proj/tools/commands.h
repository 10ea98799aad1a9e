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


// The quadcrawl subcommands as library functions. Each returns the process
// exit code: 0 success, 1 domain failure (no convergence, timeout, fault),
// 2 usage error (bad arguments, malformed or unreadable input).

#ifndef QUADCRAWL_TOOLS_COMMANDS_H_
#define QUADCRAWL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace quadcrawl::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the directory searched for scenario files
// given by bare name, and holding the default `table.json`.
inline constexpr const char* kScenarioDirEnv = "QUADCRAWL_SCENARIO_DIR";

struct PlanArgs {
  std::string scenario;  // empty: $QUADCRAWL_SCENARIO_DIR/table.json or built-in
  std::optional<Eigen::Vector4d> start;
  std::string mode = "3d";
  std::string output;  // trajectory CSV; summary goes to <output>.summary.json
};

struct GenArgs {
  std::string scenario;
  std::optional<int> count;
  std::optional<int> points;
  uint64_t seed = 1;
  int workers = 1;
  std::string output;  // dataset CSV; summary goes to <output>.summary.json
};

struct TrainArgs {
  std::string dataset;
  std::string config;  // empty: built-in desk configuration
  // Model JSON; history and metrics go to <output>.history.csv and
  // <output>.summary.json.
  std::string output;
};

struct RolloutArgs {
  std::string scenario;
  std::string model;
  // Nearest-sample policy over this dataset instead of the model.
  std::string oracle_dataset;
  uint64_t seed = 1;
  bool sample_start = false;
  std::optional<Eigen::Vector4d> start;
  std::optional<double> max_time;
  std::string output;  // trace CSV
};

struct EvalArgs {
  std::string scenario;
  std::string model;
  int trials = 20;
  uint64_t seed = 1;
  std::string output;  // optional summary JSON
};

int RunPlan(const PlanArgs& args, std::ostream& out, std::ostream& err);
int RunGen(const GenArgs& args, std::ostream& out, std::ostream& err);
int RunTrain(const TrainArgs& args, std::ostream& out, std::ostream& err);
int RunRollout(const RolloutArgs& args, std::ostream& out, std::ostream& err);
int RunEval(const EvalArgs& args, std::ostream& out, std::ostream& err);

// Parses "x,y,z,yaw".
Eigen::Vector4d ParsePose(const std::string& text);

}  // namespace quadcrawl::tools

#endif  // QUADCRAWL_TOOLS_COMMANDS_H_
