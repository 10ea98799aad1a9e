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


// quadcrawl: plan, generate data, train, roll out and evaluate.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

namespace {

using quadcrawl::tools::kExitUsage;

// Adds --start x,y,z,yaw, parsed after CLI11 is done.
void AddStartOption(CLI::App* cmd, std::string* text) {
  cmd->add_option("--start", *text, "Start pose override as x,y,z,yaw");
}

std::optional<Eigen::Vector4d> ParseStart(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return quadcrawl::tools::ParsePose(text);
}

}  // namespace

int main(int argc, char** argv) {
  namespace qt = quadcrawl::tools;
  CLI::App app{
      "quadcrawl: minimum-time torso planning, policy distillation and "
      "whole-body MPC tracking for a quadruped crawling under a table."};
  app.require_subcommand(1);
  const std::string scenario_help =
      std::string("Scenario JSON file or name (searched in $") +
      qt::kScenarioDirEnv + "); default: table.json there, else built-in";

  qt::PlanArgs plan;
  std::string plan_start;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Solve one trajectory");
  plan_cmd->add_option("--scenario", plan.scenario, scenario_help);
  AddStartOption(plan_cmd, &plan_start);
  plan_cmd->add_option("--mode", plan.mode, "3d or 2d (height frozen)")
      ->check(CLI::IsMember({"3d", "2d"}));
  plan_cmd->add_option("--output,-o", plan.output, "Trajectory CSV")->required();

  qt::GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a dataset");
  gen_cmd->add_option("--scenario", gen.scenario, scenario_help);
  gen_cmd->add_option("--count", gen.count, "Number of trajectories");
  gen_cmd->add_option("--points", gen.points, "Samples per trajectory");
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed");
  gen_cmd->add_option("--workers", gen.workers, "Solver threads");
  gen_cmd->add_option("--output,-o", gen.output, "Dataset CSV")->required();

  qt::TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the policy");
  train_cmd->add_option("--dataset", train.dataset, "Dataset CSV")->required();
  train_cmd->add_option("--config", train.config, "Training config JSON");
  train_cmd->add_option("--output,-o", train.output, "Model JSON")->required();

  qt::RolloutArgs rollout;
  std::string rollout_start;
  CLI::App* rollout_cmd =
      app.add_subcommand("rollout", "Closed-loop simulation with a policy");
  rollout_cmd->add_option("--scenario", rollout.scenario, scenario_help);
  rollout_cmd->add_option("--model", rollout.model, "Model JSON");
  rollout_cmd->add_option("--oracle-dataset", rollout.oracle_dataset,
                          "Use nearest-sample lookup in this dataset");
  rollout_cmd->add_option("--seed", rollout.seed, "Seed for --sample-start");
  rollout_cmd->add_flag("--sample-start", rollout.sample_start,
                        "Draw the start from the scenario distribution");
  AddStartOption(rollout_cmd, &rollout_start);
  rollout_cmd->add_option("--max-time", rollout.max_time,
                          "Simulated time limit (s)");
  rollout_cmd->add_option("--output,-o", rollout.output, "Trace CSV")
      ->required();

  qt::EvalArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Rollout statistics and 2D vs 3D planning");
  eval_cmd->add_option("--scenario", eval.scenario, scenario_help);
  eval_cmd->add_option("--model", eval.model, "Model JSON")->required();
  eval_cmd->add_option("--trials", eval.trials, "Number of sampled starts");
  eval_cmd->add_option("--seed", eval.seed, "Sampling seed");
  eval_cmd->add_option("--output,-o", eval.output, "Summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*plan_cmd) {
      plan.start = ParseStart(plan_start);
      return qt::RunPlan(plan, std::cout, std::cerr);
    }
    if (*gen_cmd) return qt::RunGen(gen, std::cout, std::cerr);
    if (*train_cmd) return qt::RunTrain(train, std::cout, std::cerr);
    if (*rollout_cmd) {
      rollout.start = ParseStart(rollout_start);
      return qt::RunRollout(rollout, std::cout, std::cerr);
    }
    if (*eval_cmd) return qt::RunEval(eval, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
