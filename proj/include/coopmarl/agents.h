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

#ifndef COOPMARL_AGENTS_H_
#define COOPMARL_AGENTS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "coopmarl/game_solver.h"
#include "coopmarl/qfunction.h"
#include "coopmarl/rng.h"

// The two learners.
//
// Independent learner ("darl"): each agent runs Q-learning on its own reward.
// Its joint-action table is reduced to an own-action value by taking the max
// over the opponent's actions, both for acting and for bootstrapping.
//
// Equilibrium learner ("gtrl"): at every state the two Q-matrices form a
// bimatrix game. Agents act by sampling the selected equilibrium and
// bootstrap through its value:
//   Q_k(s, a1, a2) <- (1 - alpha) Q_k(s, a1, a2)
//                     + alpha [r_k + gamma mu1(s')^T Q_k(s') mu2(s')].

namespace coopmarl {

enum class Algorithm { kDarl, kGtrl };

// Linear decay from `initial` to `final` over `decay_episodes`, constant
// afterwards.
struct EpsilonSchedule {
  double initial = 1.0;
  double final = 0.05;
  int decay_episodes = 1;

  double At(int episode) const;
  bool operator==(const EpsilonSchedule&) const = default;
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::kDarl;
  double gamma = 0.95;
  StepSizeRule alpha_rule = StepSizeRule::kConstant;
  double alpha = 0.2;
  EpsilonSchedule epsilon;

  BackendKind backend = BackendKind::kTabular;
  int bins_per_joint = 10;

  // Approximator backend only.
  std::vector<int> hidden_layers = {64, 64};
  double learning_rate = 1e-3;
  double clip_norm = 10.0;
  int target_refresh = 200;
  int replay_capacity = 50000;
  int batch_size = 32;

  // Check every selected equilibrium against the matrices it was solved on.
  bool verify_equilibria = false;

  void Validate() const;
  bool operator==(const AgentConfig&) const = default;
};

enum class PolicySource { kExploration, kGreedy, kNash };

struct JointPolicyStep {
  int a1 = 0;
  int a2 = 0;
  // Strategy each action was drawn from: one-hot for exploratory and greedy
  // choices, the equilibrium strategy for Nash draws.
  MixedStrategy mu1 = MixedStrategy::Pure(1, 0);
  MixedStrategy mu2 = MixedStrategy::Pure(1, 0);
  std::array<PolicySource, 2> source = {PolicySource::kGreedy,
                                        PolicySource::kGreedy};
  // Equilibrium of the state game (gtrl only; empty on solver fallback).
  std::optional<EquilibriumProfile> equilibrium;
};

// Own action maximising the max over opponent actions. `agent` is 1 (rows)
// or 2 (columns). Ties go to the lowest index.
int GreedyOwnAction(const Matrix& q, int agent);

// max_i max_j q(i, j): the optimistic own-action value of the best action.
double OptimisticValue(const Matrix& q);

// r + gamma * OptimisticValue(q_next), or r on terminal transitions.
double DarlTarget(double r, double gamma, const Matrix& q_next, bool terminal);

// Solves state games for the equilibrium learner and keeps statistics.
class NashSolver {
 public:
  explicit NashSolver(SolverOptions options = {}, bool verify = false)
      : options_(options), verify_(verify) {}

  // Selected equilibrium of (m1, m2), or nullopt if enumeration finds none
  // (counted as a fallback). With verification on, throws kInvalidArgument
  // if the selected profile fails VerifyEquilibrium at 1e-9.
  std::optional<EquilibriumProfile> Solve(const Matrix& m1, const Matrix& m2);

  // For callers that reuse an earlier result without re-solving.
  void CountFallback() { ++fallbacks_; }

  std::int64_t solves() const { return solves_; }
  std::int64_t fallbacks() const { return fallbacks_; }
  std::int64_t verified() const { return verified_; }
  const SolverOptions& options() const { return options_; }

 private:
  SolverOptions options_;
  bool verify_;
  std::int64_t solves_ = 0;
  std::int64_t fallbacks_ = 0;
  std::int64_t verified_ = 0;
};

JointPolicyStep ActDarl(const QFunction& q1, const QFunction& q2,
                        const Observation& state, double epsilon, Rng& rng);

// One independent Q-learning step for agent `agent` (1 or 2) on its reward.
void UpdateDarl(QFunction& qk, int agent, const Transition& t, double gamma);

// Acts from an already solved equilibrium (or the greedy fallback when
// `equilibrium` is empty).
JointPolicyStep ActFromEquilibrium(
    const Matrix& m1, const Matrix& m2,
    const std::optional<EquilibriumProfile>& equilibrium, double epsilon,
    Rng& rng);

JointPolicyStep ActGtrl(const QFunction& q1, const QFunction& q2,
                        const Observation& state, double epsilon,
                        NashSolver& solver, Rng& rng);

// Solves the next-state game once and moves both Q-functions toward their
// Nash targets with the same step. Falls back to OptimisticValue targets
// when no equilibrium is found.
void UpdateGtrl(QFunction& q1, QFunction& q2, const Transition& t,
                double gamma, NashSolver& solver);

// Builds the backend described by `config` for one agent.
std::unique_ptr<QFunction> MakeQFunction(const AgentConfig& config,
                                         std::int64_t num_states,
                                         int feature_dim, int num_actions1,
                                         int num_actions2, Rng& rng);

// Owns both agents' Q-functions and runs the configured algorithm. Both
// agents see both rewards; each Q-function is only ever updated toward its
// own agent's reward.
class Learner {
 public:
  Learner(AgentConfig config, std::unique_ptr<QFunction> q1,
          std::unique_ptr<QFunction> q2);

  JointPolicyStep Act(const Observation& state, double epsilon, Rng& rng);
  // Tabular backends update immediately; approximators push to the replay
  // buffer and fit one sampled batch once it holds batch_size transitions.
  void Learn(const Transition& t, Rng& rng);

  const AgentConfig& config() const { return config_; }
  const QFunction& q1() const { return *q1_; }
  const QFunction& q2() const { return *q2_; }
  const NashSolver& solver() const { return solver_; }

 private:
  const std::optional<EquilibriumProfile>& CachedEquilibrium(
      const Observation& state, const Matrix& m1, const Matrix& m2);
  void LearnBatch(std::span<const Transition> batch);

  AgentConfig config_;
  std::unique_ptr<QFunction> q1_;
  std::unique_ptr<QFunction> q2_;
  NashSolver solver_;
  std::optional<ReplayBuffer> replay_;
  // Tabular gtrl: equilibrium per state index, dropped when that state's
  // Q-values change.
  std::unordered_map<std::int64_t, std::optional<EquilibriumProfile>> cache_;
};

}  // namespace coopmarl

#endif  // COOPMARL_AGENTS_H_
