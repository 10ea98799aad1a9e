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


// Scenario and training-config files (JSON). Every field is optional and
// falls back to the library defaults; unknown fields are rejected. Errors
// name the offending field by its JSON path.

#ifndef QUADCRAWL_SCENARIO_H_
#define QUADCRAWL_SCENARIO_H_

#include <stdexcept>
#include <string>

#include "quadcrawl/datagen.h"
#include "quadcrawl/mlp.h"
#include "quadcrawl/planner.h"
#include "quadcrawl/simulator.h"
#include "quadcrawl/types.h"

namespace quadcrawl {

inline constexpr int kScenarioSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Scenario {
  std::string name = "table";
  TorsoPose start{0.0, 0.0, 0.28, 0.0};
  TorsoPose goal{3.0, 0.0, 0.28, 0.0};
  World world;
  PlannerConfig planner;
  InitialPoseDistribution distribution;
  int trajectory_count = 200;
  int points_per_trajectory = 100;
  QuadrupedParams robot;
  ControllerConfig controller;
  double max_time = 60.0;

  // The crawl-under-the-table scenario: a tabletop box spanning
  // x in [1.3, 1.7], y in [-0.5, 0.5], z in [0.23, 0.6].
  static Scenario Default();
  // Throws ConfigError.
  void Validate() const;
};

// Throws ConfigError naming the field.
Scenario ParseScenario(const std::string& json_text);
Scenario LoadScenario(const std::string& path);

// Canonical, fully resolved JSON (SI units).
std::string ScenarioToJson(const Scenario& scenario);

// Hash of the canonical JSON; embedded in every output file.
std::string ScenarioHash(const Scenario& scenario);

TrainConfig ParseTrainConfig(const std::string& json_text);
std::string TrainConfigToJson(const TrainConfig& config);
std::string TrainConfigHash(const TrainConfig& config);

}  // namespace quadcrawl

#endif  // QUADCRAWL_SCENARIO_H_
