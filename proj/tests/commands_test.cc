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

#include "commands.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "quadcrawl/mlp.h"
#include "quadcrawl/text_io.h"

namespace quadcrawl::tools {
namespace {

namespace fs = std::filesystem;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("quadcrawl_commands_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    setenv(kScenarioDirEnv, (std::string(QUADCRAWL_SOURCE_DIR) + "/scenarios").c_str(), 1);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }

  // Writes a model whose output is identically zero.
  std::string ZeroModel() const {
    MlpModel model = MlpModel::Create({4}, 1);
    model.SetParameters(Eigen::VectorXd::Zero(model.num_parameters()));
    const std::string path = Path("zero_model.json");
    WriteTextFile(path, model.ToJson());
    return path;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CommandsTest, ParsePose) {
  const Eigen::Vector4d v = ParsePose("1,-2.5,0.3,0");
  EXPECT_EQ(v, Eigen::Vector4d(1, -2.5, 0.3, 0));
  EXPECT_THROW(ParsePose("1,2,3"), std::invalid_argument);
  EXPECT_THROW(ParsePose("1,2,x,4"), std::invalid_argument);
}

TEST_F(CommandsTest, Plan3dCrawlsUnderTheTable) {
  PlanArgs args;
  args.output = Path("plan.csv");
  ASSERT_EQ(RunPlan(args, out_, err_), kExitOk) << err_.str();
  const std::string csv = ReadTextFile(args.output);
  EXPECT_EQ(csv.rfind("# config_hash=", 0), 0u);
  const std::string summary = ReadTextFile(args.output + ".summary.json");
  EXPECT_NE(summary.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(summary.find("\"status\": \"converged\""), std::string::npos);
  // The stdout line reports the quantity directly.
  const std::string line = out_.str();
  const size_t pos = line.find("min_z_under_obstacles=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(line.substr(pos + 22)), 0.19);
}

TEST_F(CommandsTest, Plan2dGoesAround) {
  PlanArgs args;
  args.mode = "2d";
  args.output = Path("plan2d.csv");
  ASSERT_EQ(RunPlan(args, out_, err_), kExitOk) << err_.str();
  const std::string line = out_.str();
  const size_t pos = line.find("max_abs_y=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(line.substr(pos + 10)), 0.5);
}

TEST_F(CommandsTest, PlanStartAtGoalIsTrivial) {
  PlanArgs args;
  args.start = Eigen::Vector4d(3.0, 0.0, 0.28, 0.0);
  args.output = Path("trivial.csv");
  ASSERT_EQ(RunPlan(args, out_, err_), kExitOk) << err_.str();
  std::istringstream csv(ReadTextFile(args.output));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST_F(CommandsTest, PlanUsageErrors) {
  PlanArgs args;
  args.mode = "4d";
  args.output = Path("x.csv");
  EXPECT_EQ(RunPlan(args, out_, err_), kExitUsage);
  args.mode = "3d";
  args.scenario = "no_such_scenario";
  EXPECT_EQ(RunPlan(args, out_, err_), kExitUsage);
  args.scenario.clear();
  args.output.clear();
  EXPECT_EQ(RunPlan(args, out_, err_), kExitUsage);
  // Start inside the table.
  args.output = Path("x.csv");
  args.start = Eigen::Vector4d(1.5, 0.0, 0.4, 0.0);
  EXPECT_EQ(RunPlan(args, out_, err_), kExitUsage);
  EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(CommandsTest, ScenarioByBareName) {
  PlanArgs args;
  args.scenario = "table";
  args.start = Eigen::Vector4d(3.0, 0.0, 0.28, 0.0);
  args.output = Path("named.csv");
  EXPECT_EQ(RunPlan(args, out_, err_), kExitOk) << err_.str();
}

TEST_F(CommandsTest, GenZeroCountWritesHeaderOnly) {
  GenArgs args;
  args.count = 0;
  args.output = Path("empty.csv");
  ASSERT_EQ(RunGen(args, out_, err_), kExitOk) << err_.str();
  std::istringstream csv(ReadTextFile(args.output));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 2);  // hash comment + column header
}

TEST_F(CommandsTest, GenUsageErrors) {
  GenArgs args;
  args.output = Path("d.csv");
  args.workers = 0;
  EXPECT_EQ(RunGen(args, out_, err_), kExitUsage);
  args.workers = 1;
  args.count = -1;
  EXPECT_EQ(RunGen(args, out_, err_), kExitUsage);
  args.count = 1;
  args.points = 1;
  EXPECT_EQ(RunGen(args, out_, err_), kExitUsage);
}

TEST_F(CommandsTest, GenTrainPipelineIsReproducible) {
  GenArgs gen;
  gen.count = 4;
  gen.points = 15;
  gen.seed = 9;
  gen.output = Path("d1.csv");
  ASSERT_EQ(RunGen(gen, out_, err_), kExitOk) << err_.str();
  gen.workers = 2;
  gen.output = Path("d2.csv");
  ASSERT_EQ(RunGen(gen, out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(ReadTextFile(Path("d1.csv")), ReadTextFile(Path("d2.csv")));
  EXPECT_EQ(ReadTextFile(Path("d1.csv.summary.json")),
            ReadTextFile(Path("d2.csv.summary.json")));

  WriteTextFile(Path("cfg.json"),
                R"({"hidden_sizes": [8], "epochs": 3, "batch_size": 8,
                    "learning_rate": 0.05, "seed": 2})");
  TrainArgs train;
  train.dataset = Path("d1.csv");
  train.config = Path("cfg.json");
  train.output = Path("m1.json");
  ASSERT_EQ(RunTrain(train, out_, err_), kExitOk) << err_.str();
  train.output = Path("m2.json");
  ASSERT_EQ(RunTrain(train, out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(ReadTextFile(Path("m1.json")), ReadTextFile(Path("m2.json")));
  EXPECT_EQ(ReadTextFile(Path("m1.json.history.csv")),
            ReadTextFile(Path("m2.json.history.csv")));
  EXPECT_NE(ReadTextFile(Path("m1.json")).find("config_hash"),
            std::string::npos);
  EXPECT_NE(ReadTextFile(Path("m1.json.summary.json")).find("test_mse"),
            std::string::npos);
}

TEST_F(CommandsTest, TrainUsageErrors) {
  TrainArgs args;
  args.dataset = Path("missing.csv");
  args.output = Path("m.json");
  EXPECT_EQ(RunTrain(args, out_, err_), kExitUsage);
  WriteTextFile(Path("bad.csv"), "not,a,dataset\n1,2\n");
  args.dataset = Path("bad.csv");
  EXPECT_EQ(RunTrain(args, out_, err_), kExitUsage);
}

TEST_F(CommandsTest, RolloutZeroModelTimesOut) {
  RolloutArgs args;
  args.model = ZeroModel();
  args.max_time = 1.0;
  args.output = Path("trace.csv");
  EXPECT_EQ(RunRollout(args, out_, err_), kExitFailure) << err_.str();
  EXPECT_NE(out_.str().find("outcome=timeout"), std::string::npos);
  EXPECT_EQ(ReadTextFile(args.output).rfind("# config_hash=", 0), 0u);
}

TEST_F(CommandsTest, RolloutStartAtGoalIsReached) {
  RolloutArgs args;
  args.model = ZeroModel();
  args.start = Eigen::Vector4d(3.0, 0.0, 0.28, 0.0);
  args.output = Path("trace.csv");
  EXPECT_EQ(RunRollout(args, out_, err_), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("outcome=reached time=0 "), std::string::npos)
      << out_.str();
}

TEST_F(CommandsTest, RolloutUsageErrors) {
  RolloutArgs args;
  args.output = Path("trace.csv");
  EXPECT_EQ(RunRollout(args, out_, err_), kExitUsage);  // no policy
  args.model = ZeroModel();
  args.oracle_dataset = Path("d.csv");
  EXPECT_EQ(RunRollout(args, out_, err_), kExitUsage);  // two policies
  args.oracle_dataset.clear();
  args.sample_start = true;
  args.start = Eigen::Vector4d(0, 0, 0.28, 0);
  EXPECT_EQ(RunRollout(args, out_, err_), kExitUsage);
}

TEST_F(CommandsTest, EvalZeroTrialsGivesEmptySummary) {
  EvalArgs args;
  args.model = ZeroModel();
  args.trials = 0;
  args.output = Path("eval.json");
  ASSERT_EQ(RunEval(args, out_, err_), kExitOk) << err_.str();
  const std::string summary = ReadTextFile(args.output);
  EXPECT_NE(summary.find("\"trials\": 0"), std::string::npos);
  EXPECT_EQ(summary.find("success_rate"), std::string::npos);
  EXPECT_NE(summary.find("\"per_trial\": []"), std::string::npos);
  EXPECT_NE(summary.find("config_hash"), std::string::npos);
}

TEST_F(CommandsTest, EvalUsageErrors) {
  EvalArgs args;
  args.model = Path("missing.json");
  EXPECT_EQ(RunEval(args, out_, err_), kExitUsage);
  args.model = ZeroModel();
  args.trials = -1;
  EXPECT_EQ(RunEval(args, out_, err_), kExitUsage);
}

}  // namespace
}  // namespace quadcrawl::tools
