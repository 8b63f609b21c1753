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

#ifndef COOPMARL_CONFIG_H_
#define COOPMARL_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coopmarl/agents.h"
#include "coopmarl/manip_env.h"

// Experiment configuration. The on-disk form is YAML with five sections
// (environment, agent, reward, run, output); configs/reference.yaml lists
// every key with its default. Unknown keys are rejected.

namespace coopmarl {

struct RunConfig {
  int episodes = 10000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Greedy evaluation every N training episodes; 0 disables it.
  int eval_every = 0;
  int eval_episodes = 20;
  // Rolling window for the success ratio, in episodes.
  int success_window = 500;

  bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "runs/default";
  // Intermediate checkpoints every N episodes; 0 writes the final one only.
  int checkpoint_every = 0;
  // Also write every step's actions and rewards.
  bool step_log = false;

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  EnvConfig env;
  AgentConfig agent;
  RewardStructure reward;
  RunConfig run;
  OutputConfig output;

  // Throws kConfig naming the offending field.
  void Validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// The built-in defaults (the desk-scale two-arm task) with the given
// algorithm and reward structure.
ExperimentConfig DefaultConfig(
    Algorithm algorithm = Algorithm::kDarl,
    RewardStructure reward = RewardStructure::Rs1(0.5, 0.5));

// Throws kConfig on YAML syntax errors (with the line number), unknown or
// missing required keys, wrong types, and constraint violations.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfigFile(const std::string& path);

// Canonical YAML; ParseConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const ExperimentConfig& config);

// FNV-1a over the canonical serialization, as 16 hex digits. The output
// directory is left out so relocated runs keep their hash.
std::string ConfigHash(const ExperimentConfig& config);

// Replaces one field addressed by a dotted path (e.g. "reward.kappa") with a
// YAML scalar or flow value, then re-validates.
ExperimentConfig WithOverride(const ExperimentConfig& config,
                              std::string_view path, std::string_view value);

const char* AlgorithmName(Algorithm algorithm);

}  // namespace coopmarl

#endif  // COOPMARL_CONFIG_H_
