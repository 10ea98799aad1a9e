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

#include "quadcrawl/scenario.h"

#include <string>

#include <gtest/gtest.h>

#include "quadcrawl/text_io.h"

namespace quadcrawl {
namespace {

std::string SourcePath(const std::string& relative) {
  return std::string(QUADCRAWL_SOURCE_DIR) + "/" + relative;
}

// Runs `fn`, which must throw ConfigError, and returns the message.
template <typename Fn>
std::string ConfigErrorMessage(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ConfigError";
  return {};
}

TEST(ScenarioTest, MinimalFileIsTheDefault) {
  const Scenario s = ParseScenario(R"({"schema_version": 1})");
  EXPECT_EQ(ScenarioHash(s), ScenarioHash(Scenario::Default()));
  ASSERT_EQ(s.world.obstacles.size(), 1u);
  EXPECT_DOUBLE_EQ(s.world.obstacles[0].min_corner.x(), 1.3);
  EXPECT_DOUBLE_EQ(s.world.obstacles[0].max_corner.x(), 1.7);
  EXPECT_DOUBLE_EQ(s.world.obstacles[0].min_corner.z(), 0.23);
  EXPECT_DOUBLE_EQ(s.goal.x, 3.0);
}

TEST(ScenarioTest, SchemaVersionIsRequired) {
  EXPECT_NE(ConfigErrorMessage([] { ParseScenario("{}"); })
                .find("schema_version"),
            std::string::npos);
  EXPECT_NE(ConfigErrorMessage([] { ParseScenario(R"({"schema_version": 7})"); })
                .find("schema_version"),
            std::string::npos);
}

TEST(ScenarioTest, UnknownFieldIsNamedByPath) {
  const std::string message = ConfigErrorMessage([] {
    ParseScenario(R"({"schema_version": 1, "planner": {"knots": 3}})");
  });
  EXPECT_NE(message.find("planner.knots"), std::string::npos) << message;
}

TEST(ScenarioTest, WrongTypeIsNamedByPath) {
  const std::string message = ConfigErrorMessage([] {
    ParseScenario(R"({"schema_version": 1, "goal": {"x": "far"}})");
  });
  EXPECT_NE(message.find("goal.x"), std::string::npos) << message;
}

TEST(ScenarioTest, MalformedJsonThrows) {
  EXPECT_THROW(ParseScenario("{"), ConfigError);
}

TEST(ScenarioTest, CentimetersAreScaled) {
  const Scenario s = ParseScenario(R"({
    "schema_version": 1, "length_unit": "cm",
    "goal": {"x": 250, "z": 28},
    "world": {"clearance": 5,
              "obstacles": [{"min": [100, -40, 20], "max": [150, 40, 60]}]}
  })");
  EXPECT_DOUBLE_EQ(s.goal.x, 2.5);
  EXPECT_DOUBLE_EQ(s.goal.z, 0.28);
  EXPECT_DOUBLE_EQ(s.world.clearance, 0.05);
  EXPECT_DOUBLE_EQ(s.world.obstacles[0].min_corner.z(), 0.2);
  EXPECT_DOUBLE_EQ(s.world.obstacles[0].max_corner.x(), 1.5);
}

TEST(ScenarioTest, BadUnitIsRejected) {
  EXPECT_THROW(ParseScenario(R"({"schema_version": 1, "length_unit": "ft"})"),
               ConfigError);
}

TEST(ScenarioTest, InvalidValuesAreRejected) {
  EXPECT_THROW(
      ParseScenario(R"({"schema_version": 1, "goal": {"z": -1}})"),
      ConfigError);
  EXPECT_THROW(
      ParseScenario(R"({"schema_version": 1, "planner": {"knot_count": 0}})"),
      ConfigError);
}

TEST(ScenarioTest, CanonicalJsonRoundTrips) {
  Scenario s = Scenario::Default();
  s.goal.x = 2.75;
  s.planner.knot_count = 37;
  s.world.clearance = 0.05;
  const std::string json = ScenarioToJson(s);
  const Scenario back = ParseScenario(json);
  EXPECT_EQ(ScenarioToJson(back), json);
  EXPECT_EQ(ScenarioHash(back), ScenarioHash(s));
  EXPECT_NE(ScenarioHash(s), ScenarioHash(Scenario::Default()));
}

TEST(ScenarioTest, ShippedScenarioMatchesDefault) {
  const Scenario s = LoadScenario(SourcePath("scenarios/table.json"));
  EXPECT_EQ(ScenarioHash(s), ScenarioHash(Scenario::Default()));
}

TEST(ScenarioTest, LoadErrorNamesTheFile) {
  EXPECT_ANY_THROW(LoadScenario(SourcePath("scenarios/does_not_exist.json")));
}

TEST(TrainConfigFileTest, ShippedDeskConfigMatchesPreset) {
  const TrainConfig c =
      ParseTrainConfig(ReadTextFile(SourcePath("configs/train_desk.json")));
  EXPECT_EQ(TrainConfigHash(c), TrainConfigHash(TrainConfig::Desk()));
  EXPECT_EQ(c.hidden_sizes, (std::vector<int>{64, 128, 128, 64}));
  EXPECT_EQ(c.epochs, 20);
}

TEST(TrainConfigFileTest, ShippedFullScaleConfig) {
  const TrainConfig c =
      ParseTrainConfig(ReadTextFile(SourcePath("configs/train_full_scale.json")));
  EXPECT_EQ(c.hidden_sizes,
            (std::vector<int>{256, 1024, 1024, 1024, 1024, 256}));
  EXPECT_EQ(c.batch_size, 1024);
  EXPECT_EQ(c.epochs, 20);
  EXPECT_DOUBLE_EQ(c.learning_rate, 0.5);
  EXPECT_EQ(c.schedule, LrSchedule::kConstant);
}

TEST(TrainConfigFileTest, RoundTrip) {
  const TrainConfig c = TrainConfig::Desk();
  const TrainConfig back = ParseTrainConfig(TrainConfigToJson(c));
  EXPECT_EQ(TrainConfigToJson(back), TrainConfigToJson(c));
}

TEST(TrainConfigFileTest, RejectsBadInput) {
  EXPECT_THROW(ParseTrainConfig(R"({"epochs": 0})"), ConfigError);
  EXPECT_THROW(ParseTrainConfig(R"({"learning_rate": -1})"), ConfigError);
  EXPECT_THROW(ParseTrainConfig(R"({"schedule": "cosine"})"), ConfigError);
  EXPECT_THROW(ParseTrainConfig(R"({"hidden": [4]})"), ConfigError);
  EXPECT_THROW(ParseTrainConfig(R"({"split": [0.5, 0.5, 0.5]})"), ConfigError);
}

}  // namespace
}  // namespace quadcrawl
