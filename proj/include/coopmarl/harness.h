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


#ifndef COOPMARL_HARNESS_H_
#define COOPMARL_HARNESS_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "coopmarl/agents.h"
#include "coopmarl/config.h"
#include "coopmarl/manip_env.h"
#include "coopmarl/metrics.h"
#include "coopmarl/rng.h"

// Episode loop, multi-seed campaigns and their on-disk output.
//
// Output directory layout (version 1):
//   config.yaml             canonical config; `train` on it reproduces the run
//   summary.json            CampaignSummary
//   seed_<s>.csv            episode,avg_r1,avg_r2,metric,return,success,steps
//   seed_<s>.timing.csv     episode,wall_seconds
//   seed_<s>.solver.json    solver call and fallback counts
//   seed_<s>.eval.csv       episode,success_ratio,mean_return (eval_every > 0)
//   seed_<s>.steps.csv      episode,t,a1,a2,r1,r2,success (step_log only)
//   checkpoints/seed_<s>_final.ckpt, seed_<s>_ep<N>.ckpt

namespace coopmarl {

inline constexpr int kOutputLayoutVersion = 1;

// Independent random streams per seed.
enum RngStream : std::uint64_t {
  kEnvStream = 0,
  kAgentStream = 1,
  kInitStream = 2,
  kEvalStream = 3,
};

struct EpisodeRecord {
  int episode = 0;
  std::uint64_t seed = 0;
  double sum_r1 = 0.0;
  double sum_r2 = 0.0;
  double avg_r1 = 0.0;
  double avg_r2 = 0.0;
  // avg_r1 + avg_r2.
  double metric = 0.0;
  // sum_t gamma^t (r1 + r2).
  double discounted_return = 0.0;
  bool success = false;
  int steps = 0;
  double wall_seconds = 0.0;
};

struct StepRecord {
  int episode = 0;
  int t = 0;
  int a1 = 0;
  int a2 = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  bool success = false;
};

// The backend's view of an environment state.
Observation Observe(const ExperimentConfig& config, const EnvState& state);

// Fresh Q-functions for both agents, shaped by the config.
std::unique_ptr<Learner> MakeLearner(const ExperimentConfig& config, Rng& rng);

// Resets, then acts and steps until success or the horizon. Learns from each
// transition when `learn` is set. Appends to `steps` if given. Success is
// terminal; reaching the horizon is not.
EpisodeRecord RunEpisode(const ExperimentConfig& config, Learner& learner,
                         int episode, double epsilon, bool learn,
                         Rng& env_rng, Rng& agent_rng,
                         std::vector<StepRecord>* steps = nullptr);

struct EvalResult {
  double success_ratio = 0.0;
  double mean_return = 0.0;
};

// Greedy rollouts (epsilon 0, no learning) of a frozen learner.
EvalResult Evaluate(const ExperimentConfig& config, const QFunction& q1,
                    const QFunction& q2, int episodes, Rng& rng);
// Loads a checkpoint and evaluates it. Throws kCheckpointIncompatible if its
// shape does not match the config.
EvalResult EvaluateCheckpoint(const std::string& path,
                              const ExperimentConfig& config, int episodes,
                              Rng& rng);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  std::vector<StepRecord> steps;
  // (training episode count, result) per periodic evaluation.
  std::vector<std::pair<int, EvalResult>> evals;
  std::int64_t solver_solves = 0;
  std::int64_t solver_fallbacks = 0;
  std::int64_t solver_verified = 0;
};

// Trains one seed. Writes checkpoints under `checkpoint_dir` unless empty.
// Errors carry the seed and, for divergence, the episode index.
SeedResult RunSeed(const ExperimentConfig& config, std::uint64_t seed,
                   const std::string& checkpoint_dir = "");

struct CampaignOptions {
  int workers = 1;
  // Progress lines go here when set.
  std::ostream* progress = nullptr;
};

// Runs every seed, writes the output directory and returns the summary. The
// directory is created and probed before any training starts.
CampaignSummary RunCampaign(const ExperimentConfig& config,
                            const CampaignOptions& options = {});

// Rebuilds the summary from an output directory's config and metric files.
CampaignSummary LoadCampaignSummary(const std::string& directory);

// Per-seed metric files of an output directory, in config seed order.
std::vector<SeedMetrics> LoadSeedMetrics(const std::string& directory);

}  // namespace coopmarl

#endif  // COOPMARL_HARNESS_H_
