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


#include "coopmarl/harness.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coopmarl/checkpoint.h"
#include "coopmarl/error.h"
#include "gtest/gtest.h"

namespace coopmarl {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path FreshDir(const std::string& name) {
  const fs::path p = fs::path(testing::TempDir()) / ("coopmarl_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig Small(Algorithm algo = Algorithm::kDarl) {
  auto c = DefaultConfig(algo);
  c.run.episodes = 10;
  c.run.seeds = {1, 2};
  c.run.success_window = 4;
  c.env.task.horizon = 30;
  return c;
}

TEST(RunEpisodeTest, HorizonOneTakesOneStep) {
  auto c = Small();
  c.env.task.horizon = 1;
  Rng init(1);
  auto learner = MakeLearner(c, init);
  Rng env(2);
  Rng agent(3);
  std::vector<StepRecord> steps;
  const auto r = RunEpisode(c, *learner, 0, 0.5, true, env, agent, &steps);
  EXPECT_EQ(r.steps, 1);
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(r.metric, steps[0].r1 + steps[0].r2);
  EXPECT_EQ(r.discounted_return, steps[0].r1 + steps[0].r2);
}

TEST(RunEpisodeTest, StartingAtTheGoalSucceedsOnTheFirstStep) {
  auto c = Small();
  const Vec2 b1 = c.env.arm1.base;
  const Vec2 b2 = c.env.arm2.base;
  // Elbow-consistent inverse kinematics for 0.3/0.3 links.
  auto ik = [](Vec2 base, Vec2 target, double elbow_sign) {
    const double dx = target.x - base.x;
    const double dy = target.y - base.y;
    const double c2 = (dx * dx + dy * dy - 0.18) / 0.18;
    const double q2 = elbow_sign * std::acos(c2);
    const double q1 = std::atan2(dy, dx) -
                      std::atan2(0.3 * std::sin(q2), 0.3 + 0.3 * std::cos(q2));
    return std::pair{q1, q2};
  };
  const auto [a1, a2] = ik(b1, c.env.task.target1, 1.0);
  const auto [c1, c2] = ik(b2, c.env.task.target2, -1.0);
  c.env.start1 = {{a1, a1 + 1e-9}, {a2, a2 + 1e-9}};
  c.env.start2 = {{c1, c1 + 1e-9}, {c2, c2 + 1e-9}};
  ASSERT_NO_THROW(c.Validate());
  Rng init(1);
  auto learner = MakeLearner(c, init);
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng env(s);
    Rng agent(s + 100);
    const auto r = RunEpisode(c, *learner, 0, 1.0, false, env, agent);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.steps, 1);
    EXPECT_LE(std::abs(r.discounted_return), 0.5);
  }
}

TEST(RunSeedTest, Deterministic) {
  for (Algorithm algo : {Algorithm::kDarl, Algorithm::kGtrl}) {
    const auto c = Small(algo);
    const auto a = RunSeed(c, 7);
    const auto b = RunSeed(c, 7);
    ASSERT_EQ(a.episodes.size(), 10u);
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
      EXPECT_EQ(a.episodes[i].metric, b.episodes[i].metric);
      EXPECT_EQ(a.episodes[i].steps, b.episodes[i].steps);
      EXPECT_EQ(a.episodes[i].discounted_return,
                b.episodes[i].discounted_return);
    }
    EXPECT_EQ(a.solver_solves, b.solver_solves);
    const auto other = RunSeed(c, 8);
    bool differs = false;
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
      differs |= a.episodes[i].metric != other.episodes[i].metric;
    }
    EXPECT_TRUE(differs);
  }
}

TEST(CampaignTest, WritesTheLayoutAndReloads) {
  auto c = Small();
  c.output.directory = FreshDir("layout").string();
  c.output.step_log = true;
  c.run.eval_every = 5;
  c.run.eval_episodes = 2;
  const auto summary = RunCampaign(c);
  const fs::path dir = c.output.directory;
  for (const char* f :
       {"config.yaml", "summary.json", "seed_1.csv", "seed_2.csv",
        "seed_1.timing.csv", "seed_1.solver.json", "seed_1.eval.csv",
        "seed_1.steps.csv", "checkpoints/seed_1_final.ckpt",
        "checkpoints/seed_2_final.ckpt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string csv = Slurp(dir / "seed_1.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "episode,avg_r1,avg_r2,metric,return,success,steps");
  EXPECT_EQ(LoadConfigFile((dir / "config.yaml").string()), c);
  EXPECT_EQ(LoadCampaignSummary(dir.string()), summary);
  EXPECT_EQ(summary.config_hash, ConfigHash(c));
  EXPECT_EQ(summary.seeds, c.run.seeds);
  ASSERT_EQ(summary.metric_mean.size(), 10u);
}

TEST(CampaignTest, MetricMatchesTheStepLog) {
  auto c = Small();
  c.output.directory = FreshDir("steplog").string();
  c.output.step_log = true;
  RunCampaign(c);
  const auto seeds = LoadSeedMetrics(c.output.directory);
  std::ifstream in(fs::path(c.output.directory) / "seed_1.steps.csv");
  std::string line;
  std::getline(in, line);
  std::vector<double> s1(10, 0.0);
  std::vector<double> s2(10, 0.0);
  std::vector<int> n(10, 0);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    ASSERT_EQ(f.size(), 7u);
    const int e = std::stoi(f[0]);
    s1[e] += std::stod(f[4]);
    s2[e] += std::stod(f[5]);
    ++n[e];
  }
  for (int e = 0; e < 10; ++e) {
    EXPECT_NEAR(seeds[0].metric[e], s1[e] / n[e] + s2[e] / n[e], 1e-12);
  }
}

TEST(CampaignTest, WorkerCountDoesNotChangeOutput) {
  auto c = Small(Algorithm::kGtrl);
  c.run.seeds = {1, 2, 3};
  c.output.directory = FreshDir("w1").string();
  const auto one = RunCampaign(c, {1, nullptr});
  const auto d1 = c.output.directory;
  c.output.directory = FreshDir("w3").string();
  const auto three = RunCampaign(c, {3, nullptr});
  EXPECT_EQ(one, three);
  for (const char* f : {"seed_1.csv", "seed_2.csv", "seed_3.csv",
                        "summary.json", "seed_3.solver.json"}) {
    EXPECT_EQ(Slurp(fs::path(d1) / f), Slurp(fs::path(c.output.directory) / f))
        << f;
  }
}

TEST(CampaignTest, SingleSeedHasZeroSpread) {
  auto c = Small();
  c.run.seeds = {4};
  c.output.directory = FreshDir("single").string();
  const auto s = RunCampaign(c);
  for (double v : s.metric_std) EXPECT_EQ(v, 0.0);
}

TEST(CampaignTest, UnwritableDirectoryIsAnIoError) {
  const fs::path base = FreshDir("blocked");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  auto c = Small();
  c.output.directory = (base / "file" / "out").string();
  try {
    RunCampaign(c);
    FAIL() << "expected an io error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kIo);
  }
}

TEST(EvaluateTest, RejectsZeroEpisodes) {
  const auto c = Small();
  Rng init(1);
  auto learner = MakeLearner(c, init);
  Rng rng(1);
  try {
    Evaluate(c, learner->q1(), learner->q2(), 0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kInvalidArgument);
  }
}

TEST(EvaluateTest, ZeroCheckpointFollowsLowestIndexActions) {
  auto c = Small();
  c.env.task.noise_sigma = 0.0;
  c.env.task.horizon = 15;
  const fs::path dir = FreshDir("zero");
  fs::create_directories(dir);
  const std::int64_t cells = NumGridCells(4, c.agent.bins_per_joint);
  const TabularQ zero(QTable(cells, 9, 9), StepSizeRule::kConstant, 0.1);
  SaveCheckpoint((dir / "z.ckpt").string(), zero, zero);

  Rng rng(3);
  const auto got = EvaluateCheckpoint((dir / "z.ckpt").string(), c, 1, rng);

  // Oracle: both arms take action 0 every step.
  Rng oracle(3);
  EnvState s = Reset(c.env, oracle);
  const ActionCodec codec(2, c.env.delta);
  double ret = 0.0;
  double discount = 1.0;
  bool success = false;
  for (int t = 0; t < c.env.task.horizon && !success; ++t) {
    s = Step(c.env, s, codec.Decode(0), codec.Decode(0), oracle);
    const auto [r1, r2] = Rewards(s, c.env.task, c.reward);
    ret += discount * (r1 + r2);
    discount *= c.agent.gamma;
    success = IsSuccess(s, c.env.task);
  }
  EXPECT_EQ(got.success_ratio, success ? 1.0 : 0.0);
  EXPECT_NEAR(got.mean_return, ret, 1e-12);
}

TEST(EvaluateTest, MismatchedCheckpointIsRejected) {
  auto c = Small();
  const fs::path dir = FreshDir("mismatch");
  fs::create_directories(dir);
  const TabularQ small(QTable(5, 9, 9), StepSizeRule::kConstant, 0.1);
  SaveCheckpoint((dir / "s.ckpt").string(), small, small);
  Rng rng(1);
  try {
    EvaluateCheckpoint((dir / "s.ckpt").string(), c, 1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kCheckpointIncompatible);
  }
}

}  // namespace
}  // namespace coopmarl
