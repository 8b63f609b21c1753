// Copyright 2026 The coopmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "coopmarl/config.h"

#include <string>

#include "coopmarl/error.h"
#include "gtest/gtest.h"

namespace coopmarl {
namespace {

constexpr char kMinimal[] = R"(agent:
  algorithm: darl
reward:
  structure: rs1
)";

ErrorCategory CategoryOf(std::string_view text, std::string* what = nullptr) {
  try {
    ParseConfig(text);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.category();
  }
  ADD_FAILURE() << "parsed:\n" << text;
  return ErrorCategory::kInvalidArgument;
}

TEST(ConfigTest, MinimalConfigTakesDefaults) {
  EXPECT_EQ(ParseConfig(kMinimal), DefaultConfig());
  const auto gtrl = ParseConfig(
      "agent: {algorithm: gtrl}\nreward: {structure: rs2, kappa: 2}\n");
  EXPECT_EQ(gtrl, DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs2(2.0)));
}

TEST(ConfigTest, DefaultValidates) {
  EXPECT_NO_THROW(DefaultConfig().Validate());
  EXPECT_NO_THROW(DefaultConfig(Algorithm::kGtrl).Validate());
}

TEST(ConfigTest, MissingRequiredKeys) {
  EXPECT_EQ(CategoryOf("reward: {structure: rs1}\n"), ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf("agent: {algorithm: darl}\n"), ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf("agent: {algorithm: sarsa}\nreward: {structure: rs1}\n"),
            ErrorCategory::kConfig);
}

TEST(ConfigTest, NegativeKappaNamesTheField) {
  std::string what;
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "  kappa1: -0.1\n", &what),
            ErrorCategory::kConfig);
  EXPECT_NE(what.find("kappa1"), std::string::npos) << what;
}

TEST(ConfigTest, KappaKeysFollowTheStructure) {
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "  kappa: 1\n"),
            ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf("agent: {algorithm: darl}\n"
                       "reward: {structure: rs2, kappa1: 1}\n"),
            ErrorCategory::kConfig);
}

TEST(ConfigTest, UnknownKeyReportsLine) {
  std::string what;
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "run:\n  episodes: 5\n  epsiodes: 6\n",
                       &what),
            ErrorCategory::kConfig);
  EXPECT_NE(what.find("epsiodes"), std::string::npos) << what;
  EXPECT_NE(what.find("line 7"), std::string::npos) << what;
}

TEST(ConfigTest, TypeAndSyntaxErrors) {
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "run: {episodes: many}\n"),
            ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf("agent: [\n"), ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "run: {seeds: [1, 1]}\n"),
            ErrorCategory::kConfig);
  EXPECT_EQ(CategoryOf(std::string(kMinimal) + "agent2: {}\n"),
            ErrorCategory::kConfig);
}

TEST(ConfigTest, SerializationRoundTrips) {
  auto c = DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs2(0.75));
  c.agent.alpha_rule = StepSizeRule::kVisitCount;
  c.agent.hidden_layers = {7, 5, 3};
  c.agent.verify_equilibria = true;
  c.env.delta = 0.1 / 3.0;
  c.run.seeds = {3, 1, 4};
  c.output.directory = "some where/x";
  c.output.step_log = true;
  EXPECT_EQ(ParseConfig(SerializeConfig(c)), c);
  EXPECT_EQ(SerializeConfig(ParseConfig(SerializeConfig(c))),
            SerializeConfig(c));
}

TEST(ConfigTest, HashIsStableAndSensitive) {
  const auto c = DefaultConfig();
  EXPECT_EQ(ConfigHash(c), ConfigHash(ParseConfig(SerializeConfig(c))));
  EXPECT_EQ(ConfigHash(c).size(), 16u);
  auto moved = c;
  moved.output.directory = "elsewhere";
  EXPECT_EQ(ConfigHash(moved), ConfigHash(c));
  auto other = c;
  other.run.episodes += 1;
  EXPECT_NE(ConfigHash(other), ConfigHash(c));
}

TEST(ConfigTest, OverrideReplacesOneField) {
  const auto c = DefaultConfig(Algorithm::kGtrl, RewardStructure::Rs2(1.0));
  const auto k = WithOverride(c, "reward.kappa", "2.5");
  EXPECT_EQ(k.reward.kappa, 2.5);
  auto expected = c;
  expected.reward = RewardStructure::Rs2(2.5);
  EXPECT_EQ(k, expected);
  EXPECT_EQ(WithOverride(c, "run.seeds", "[7, 8]").run.seeds,
            (std::vector<std::uint64_t>{7, 8}));
  EXPECT_THROW(WithOverride(c, "reward.kappa", "-1"), Error);
  EXPECT_THROW(WithOverride(c, "run.nope", "1"), Error);
}

TEST(ConfigTest, ShippedConfigsParse) {
  const std::string dir = COOPMARL_CONFIG_DIR;
  auto reference = DefaultConfig();
  EXPECT_EQ(LoadConfigFile(dir + "/reference.yaml"), reference);
  reference.output.directory = "runs/darl_rs1";
  EXPECT_EQ(LoadConfigFile(dir + "/darl_rs1.yaml"), reference);
  const auto rs1 = LoadConfigFile(dir + "/gtrl_rs1.yaml");
  const auto rs2 = LoadConfigFile(dir + "/gtrl_rs2.yaml");
  EXPECT_EQ(rs1.agent.algorithm, Algorithm::kGtrl);
  EXPECT_EQ(rs1.reward.total_weight(), rs2.reward.total_weight());
}

}  // namespace
}  // namespace coopmarl
