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

#include "coopmarl/agents.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coopmarl/error.h"

namespace coopmarl {
namespace {

constexpr double kVerifyTolerance = 1e-9;

int SampleFrom(const MixedStrategy& mu, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  int last = 0;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu[i] <= 0.0) continue;
    cumulative += mu[i];
    last = i;
    if (u < cumulative) return i;
  }
  return last;
}

}  // namespace

double EpsilonSchedule::At(int episode) const {
  if (episode >= decay_episodes) return final;
  const double frac =
      static_cast<double>(std::max(episode, 0)) / decay_episodes;
  return initial + (final - initial) * frac;
}

void AgentConfig::Validate() const {
  Check(gamma >= 0.0 && gamma < 1.0, ErrorCategory::kInvalidArgument,
        "gamma must be in [0, 1)");
  Check(alpha >= 0.0 && alpha <= 1.0, ErrorCategory::kInvalidArgument,
        "alpha must be in [0, 1]");
  Check(epsilon.initial >= 0.0 && epsilon.initial <= 1.0,
        ErrorCategory::kInvalidArgument, "epsilon_initial must be in [0, 1]");
  Check(epsilon.final >= 0.0 && epsilon.final <= 1.0,
        ErrorCategory::kInvalidArgument, "epsilon_final must be in [0, 1]");
  Check(epsilon.final <= epsilon.initial, ErrorCategory::kInvalidArgument,
        "epsilon_final must not exceed epsilon_initial");
  Check(epsilon.decay_episodes >= 1, ErrorCategory::kInvalidArgument,
        "epsilon_decay_episodes must be >= 1");
  Check(bins_per_joint >= 2, ErrorCategory::kInvalidArgument,
        "bins_per_joint must be >= 2");
  for (int h : hidden_layers) {
    Check(h > 0, ErrorCategory::kInvalidArgument,
          "hidden_layers entries must be > 0");
  }
  Check(learning_rate >= 0.0 && std::isfinite(learning_rate),
        ErrorCategory::kInvalidArgument, "learning_rate must be >= 0");
  Check(clip_norm >= 0.0, ErrorCategory::kInvalidArgument,
        "clip_norm must be >= 0");
  Check(target_refresh >= 1, ErrorCategory::kInvalidArgument,
        "target_refresh must be >= 1");
  Check(batch_size >= 1, ErrorCategory::kInvalidArgument,
        "batch_size must be >= 1");
  Check(replay_capacity >= batch_size, ErrorCategory::kInvalidArgument,
        "replay_capacity must be >= batch_size");
}

int GreedyOwnAction(const Matrix& q, int agent) {
  Check(agent == 1 || agent == 2, ErrorCategory::kInvalidArgument,
        "agent must be 1 or 2");
  const int own = agent == 1 ? q.rows() : q.cols();
  const int other = agent == 1 ? q.cols() : q.rows();
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < own; ++a) {
    double value = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < other; ++b) {
      value = std::max(value, agent == 1 ? q(a, b) : q(b, a));
    }
    if (value > best_value) {
      best_value = value;
      best = a;
    }
  }
  return best;
}

double OptimisticValue(const Matrix& q) {
  return *std::max_element(q.data().begin(), q.data().end());
}

double DarlTarget(double r, double gamma, const Matrix& q_next,
                  bool terminal) {
  if (terminal) return r;
  return r + gamma * OptimisticValue(q_next);
}

std::optional<EquilibriumProfile> NashSolver::Solve(const Matrix& m1,
                                                    const Matrix& m2) {
  ++solves_;
  const BimatrixGame game(m1, m2);
  std::optional<EquilibriumProfile> best = SolveAndSelect(game, options_);
  if (!best) {
    ++fallbacks_;
    return best;
  }
  if (verify_) {
    Check(VerifyEquilibrium(game, *best, kVerifyTolerance),
          ErrorCategory::kInvalidArgument,
          "selected profile is not an equilibrium of its state game");
    ++verified_;
  }
  return best;
}

JointPolicyStep ActDarl(const QFunction& q1, const QFunction& q2,
                        const Observation& state, double epsilon, Rng& rng) {
  const int n1 = q1.num_actions1();
  const int n2 = q1.num_actions2();
  JointPolicyStep step;
  if (rng.Bernoulli(epsilon)) {
    step.a1 = rng.UniformInt(n1);
    step.source[0] = PolicySource::kExploration;
  } else {
    step.a1 = GreedyOwnAction(q1.QMatrix(state), 1);
  }
  if (rng.Bernoulli(epsilon)) {
    step.a2 = rng.UniformInt(n2);
    step.source[1] = PolicySource::kExploration;
  } else {
    step.a2 = GreedyOwnAction(q2.QMatrix(state), 2);
  }
  step.mu1 = MixedStrategy::Pure(n1, step.a1);
  step.mu2 = MixedStrategy::Pure(n2, step.a2);
  return step;
}

void UpdateDarl(QFunction& qk, int agent, const Transition& t, double gamma) {
  Check(agent == 1 || agent == 2, ErrorCategory::kInvalidArgument,
        "agent must be 1 or 2");
  const double r = agent == 1 ? t.r1 : t.r2;
  const double target =
      t.terminal ? r : DarlTarget(r, gamma, qk.BootstrapMatrix(t.next_state),
                                  false);
  const QSample sample{&t.state, t.a1, t.a2, target};
  qk.Fit(std::span<const QSample>(&sample, 1));
}

JointPolicyStep ActFromEquilibrium(
    const Matrix& m1, const Matrix& m2,
    const std::optional<EquilibriumProfile>& equilibrium, double epsilon,
    Rng& rng) {
  const int n1 = m1.rows();
  const int n2 = m1.cols();
  JointPolicyStep step;
  step.equilibrium = equilibrium;
  const PolicySource source =
      equilibrium ? PolicySource::kNash : PolicySource::kGreedy;

  if (rng.Bernoulli(epsilon)) {
    step.a1 = rng.UniformInt(n1);
    step.mu1 = MixedStrategy::Pure(n1, step.a1);
    step.source[0] = PolicySource::kExploration;
  } else if (equilibrium) {
    step.a1 = SampleFrom(equilibrium->mu1, rng);
    step.mu1 = equilibrium->mu1;
    step.source[0] = source;
  } else {
    step.a1 = GreedyOwnAction(m1, 1);
    step.mu1 = MixedStrategy::Pure(n1, step.a1);
    step.source[0] = source;
  }

  if (rng.Bernoulli(epsilon)) {
    step.a2 = rng.UniformInt(n2);
    step.mu2 = MixedStrategy::Pure(n2, step.a2);
    step.source[1] = PolicySource::kExploration;
  } else if (equilibrium) {
    step.a2 = SampleFrom(equilibrium->mu2, rng);
    step.mu2 = equilibrium->mu2;
    step.source[1] = source;
  } else {
    step.a2 = GreedyOwnAction(m2, 2);
    step.mu2 = MixedStrategy::Pure(n2, step.a2);
    step.source[1] = source;
  }
  return step;
}

JointPolicyStep ActGtrl(const QFunction& q1, const QFunction& q2,
                        const Observation& state, double epsilon,
                        NashSolver& solver, Rng& rng) {
  const Matrix m1 = q1.QMatrix(state);
  const Matrix m2 = q2.QMatrix(state);
  return ActFromEquilibrium(m1, m2, solver.Solve(m1, m2), epsilon, rng);
}

namespace {

// Targets for both agents from one next-state equilibrium.
std::pair<double, double> GtrlTargets(const Matrix& next1, const Matrix& next2,
                                      const std::optional<EquilibriumProfile>& eq,
                                      const Transition& t, double gamma) {
  if (t.terminal) return {t.r1, t.r2};
  if (!eq) {
    return {DarlTarget(t.r1, gamma, next1, false),
            DarlTarget(t.r2, gamma, next2, false)};
  }
  return {TdTargetNash(t.r1, gamma, next1, eq->mu1, eq->mu2),
          TdTargetNash(t.r2, gamma, next2, eq->mu1, eq->mu2)};
}

}  // namespace

void UpdateGtrl(QFunction& q1, QFunction& q2, const Transition& t,
                double gamma, NashSolver& solver) {
  std::pair<double, double> targets{t.r1, t.r2};
  if (!t.terminal) {
    const Matrix next1 = q1.BootstrapMatrix(t.next_state);
    const Matrix next2 = q2.BootstrapMatrix(t.next_state);
    targets = GtrlTargets(next1, next2, solver.Solve(next1, next2), t, gamma);
  }
  const QSample s1{&t.state, t.a1, t.a2, targets.first};
  const QSample s2{&t.state, t.a1, t.a2, targets.second};
  q1.Fit(std::span<const QSample>(&s1, 1));
  q2.Fit(std::span<const QSample>(&s2, 1));
}

std::unique_ptr<QFunction> MakeQFunction(const AgentConfig& config,
                                         std::int64_t num_states,
                                         int feature_dim, int num_actions1,
                                         int num_actions2, Rng& rng) {
  if (config.backend == BackendKind::kTabular) {
    return std::make_unique<TabularQ>(
        QTable(num_states, num_actions1, num_actions2, 0.0), config.alpha_rule,
        config.alpha);
  }
  std::vector<int> sizes{feature_dim};
  sizes.insert(sizes.end(), config.hidden_layers.begin(),
               config.hidden_layers.end());
  sizes.push_back(num_actions1 * num_actions2);
  ApproximatorOptions options;
  options.learning_rate = config.learning_rate;
  options.clip_norm = config.clip_norm;
  options.target_refresh = config.target_refresh;
  return std::make_unique<ApproximatorQ>(DenseApproximator(sizes, rng),
                                         num_actions1, num_actions2, options);
}

Learner::Learner(AgentConfig config, std::unique_ptr<QFunction> q1,
                 std::unique_ptr<QFunction> q2)
    : config_(std::move(config)),
      q1_(std::move(q1)),
      q2_(std::move(q2)),
      solver_(SolverOptions{}, config_.verify_equilibria) {
  config_.Validate();
  Check(q1_ && q2_, ErrorCategory::kInvalidArgument, "missing Q-function");
  Check(q1_->num_actions1() == q2_->num_actions1() &&
            q1_->num_actions2() == q2_->num_actions2(),
        ErrorCategory::kInvalidArgument,
        "both agents' Q-functions must share the joint action shape");
  Check(q1_->kind() == q2_->kind(), ErrorCategory::kInvalidArgument,
        "both agents must use the same backend kind");
  if (q1_->kind() == BackendKind::kApproximator) {
    replay_.emplace(static_cast<std::size_t>(config_.replay_capacity));
  }
}

const std::optional<EquilibriumProfile>& Learner::CachedEquilibrium(
    const Observation& state, const Matrix& m1, const Matrix& m2) {
  auto it = cache_.find(state.index);
  if (it != cache_.end()) {
    if (!it->second) solver_.CountFallback();
    return it->second;
  }
  return cache_.emplace(state.index, solver_.Solve(m1, m2)).first->second;
}

JointPolicyStep Learner::Act(const Observation& state, double epsilon,
                             Rng& rng) {
  if (config_.algorithm == Algorithm::kDarl) {
    return ActDarl(*q1_, *q2_, state, epsilon, rng);
  }
  const Matrix m1 = q1_->QMatrix(state);
  const Matrix m2 = q2_->QMatrix(state);
  if (q1_->kind() == BackendKind::kTabular) {
    return ActFromEquilibrium(m1, m2, CachedEquilibrium(state, m1, m2),
                              epsilon, rng);
  }
  return ActFromEquilibrium(m1, m2, solver_.Solve(m1, m2), epsilon, rng);
}

void Learner::Learn(const Transition& t, Rng& rng) {
  if (!replay_) {
    LearnBatch(std::span<const Transition>(&t, 1));
    return;
  }
  replay_->Push(t);
  const auto batch =
      replay_->Sample(static_cast<std::size_t>(config_.batch_size), rng);
  if (batch) LearnBatch(*batch);
}

void Learner::LearnBatch(std::span<const Transition> batch) {
  const double gamma = config_.gamma;
  if (config_.algorithm == Algorithm::kDarl) {
    if (!replay_) {
      UpdateDarl(*q1_, 1, batch.front(), gamma);
      UpdateDarl(*q2_, 2, batch.front(), gamma);
      return;
    }
    std::vector<QSample> s1;
    std::vector<QSample> s2;
    for (const Transition& t : batch) {
      s1.push_back({&t.state, t.a1, t.a2,
                    DarlTarget(t.r1, gamma,
                               q1_->BootstrapMatrix(t.next_state), t.terminal)});
      s2.push_back({&t.state, t.a1, t.a2,
                    DarlTarget(t.r2, gamma,
                               q2_->BootstrapMatrix(t.next_state), t.terminal)});
    }
    q1_->Fit(s1);
    q2_->Fit(s2);
    return;
  }

  std::vector<QSample> s1;
  std::vector<QSample> s2;
  for (const Transition& t : batch) {
    std::pair<double, double> targets{t.r1, t.r2};
    if (!t.terminal) {
      const Matrix next1 = q1_->BootstrapMatrix(t.next_state);
      const Matrix next2 = q2_->BootstrapMatrix(t.next_state);
      const std::optional<EquilibriumProfile>& eq =
          replay_ ? solver_.Solve(next1, next2)
                  : CachedEquilibrium(t.next_state, next1, next2);
      targets = GtrlTargets(next1, next2, eq, t, gamma);
    }
    s1.push_back({&t.state, t.a1, t.a2, targets.first});
    s2.push_back({&t.state, t.a1, t.a2, targets.second});
  }
  q1_->Fit(s1);
  q2_->Fit(s2);
  if (!replay_) {
    for (const Transition& t : batch) cache_.erase(t.state.index);
  }
}

}  // namespace coopmarl
