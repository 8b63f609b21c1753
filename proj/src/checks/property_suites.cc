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


#include "coopmarl/checks/property_suites.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coopmarl/agents.h"
#include "coopmarl/checks/oracles.h"
#include "coopmarl/error.h"
#include "coopmarl/game_solver.h"
#include "coopmarl/qfunction.h"
#include "coopmarl/rng.h"

namespace coopmarl::checks {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix RandomMatrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.Uniform(-1.0, 1.0);
  }
  return m;
}

// First failure message wins; later ones only bump the count.
class Failures {
 public:
  void Add(const std::string& what) {
    if (count_++ == 0) first_ = what;
  }
  int count() const { return count_; }
  const std::string& first() const { return first_; }

 private:
  int count_ = 0;
  std::string first_;
};

void Finish(SuiteResult& r, const Failures& f, Clock::time_point start,
            const std::string& ok_detail) {
  r.seconds = Since(start);
  r.passed = f.count() == 0 && r.seconds < r.time_limit_seconds;
  std::ostringstream o;
  if (f.count() > 0) {
    o << f.count() << " failure(s); first: " << f.first();
  } else {
    o << ok_detail;
  }
  o << "; " << r.seconds << " s (limit " << r.time_limit_seconds << " s)";
  r.detail = o.str();
}

bool MatchesOracle(const EquilibriumProfile& e, const Equilibrium2x2& o) {
  const std::vector<double> p1{o.p, 1.0 - o.p};
  const std::vector<double> p2{o.q, 1.0 - o.q};
  auto support = [](const std::vector<double>& v) {
    std::vector<int> s;
    for (int i = 0; i < 2; ++i) {
      if (v[i] > 1e-9) s.push_back(i);
    }
    return s;
  };
  if (e.mu1.Support() != support(p1) || e.mu2.Support() != support(p2)) {
    return false;
  }
  for (int i = 0; i < 2; ++i) {
    if (std::abs(e.mu1[i] - p1[i]) > 1e-8) return false;
    if (std::abs(e.mu2[i] - p2[i]) > 1e-8) return false;
  }
  return true;
}

}  // namespace

SuiteResult SolverSoundness(int games, int games_2x2, std::uint64_t seed) {
  SuiteResult r;
  r.name = "solver soundness";
  r.time_limit_seconds = 10.0;
  const auto start = Clock::now();
  Rng rng(seed);
  Failures f;
  int profiles = 0;
  for (int g = 0; g < games + games_2x2; ++g) {
    const bool square2 = g >= games;
    const int rows = square2 ? 2 : 2 + rng.UniformInt(3);
    const int cols = square2 ? 2 : 2 + rng.UniformInt(3);
    const Matrix a = RandomMatrix(rows, cols, rng);
    const Matrix b = RandomMatrix(rows, cols, rng);
    const BimatrixGame game(a, b);
    const std::string tag = "game " + std::to_string(g) + " (" +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            ")";
    const std::vector<EquilibriumProfile> eqs = SolveSupportEnumeration(game);
    if (eqs.empty()) {
      f.Add(tag + ": no equilibrium");
      continue;
    }
    for (const EquilibriumProfile& e : eqs) {
      ++profiles;
      if (!VerifyEquilibrium(game, e, 1e-9)) f.Add(tag + ": profile fails verify");
      const auto [v1, v2] = ExpectedPayoffs(game, e.mu1, e.mu2);
      if (std::abs(v1 - e.payoff1) > 1e-9 || std::abs(v2 - e.payoff2) > 1e-9) {
        f.Add(tag + ": payoffs disagree with the bilinear form");
      }
    }
    const auto selected = SolveAndSelect(game);
    const EquilibriumProfile best = SelectEquilibrium(eqs);
    if (!selected || selected->mu1 != best.mu1 || selected->mu2 != best.mu2) {
      f.Add(tag + ": SolveAndSelect differs from selecting over all");
    }
    if (rows == 2 && cols == 2) {
      const std::vector<Equilibrium2x2> oracle = BruteForce2x2(a, b);
      if (oracle.size() != eqs.size()) {
        f.Add(tag + ": " + std::to_string(eqs.size()) + " equilibria, oracle " +
              std::to_string(oracle.size()));
        continue;
      }
      for (const Equilibrium2x2& o : oracle) {
        const bool found = std::any_of(
            eqs.begin(), eqs.end(),
            [&](const EquilibriumProfile& e) { return MatchesOracle(e, o); });
        if (!found) f.Add(tag + ": oracle equilibrium not found");
      }
    }
  }
  Finish(r, f, start,
         std::to_string(games + games_2x2) + " games, " +
             std::to_string(profiles) + " profiles verified");
  return r;
}

SuiteResult UpdateMicroProperties(std::uint64_t seed) {
  SuiteResult r;
  r.name = "update micro-properties";
  r.time_limit_seconds = 1.0;
  const auto start = Clock::now();
  Rng rng(seed);
  Failures f;

  // Convex combination bound and the two degenerate step sizes.
  for (int i = 0; i < 10000; ++i) {
    const double old = rng.Uniform(-100.0, 100.0);
    const double target = rng.Uniform(-100.0, 100.0);
    const double alpha = i % 3 == 0 ? rng.Uniform() : (i % 3 == 1 ? 0.0 : 1.0);
    QTable t(1, 1, 1);
    t.Set(0, 0, 0, old);
    t.Update(0, 0, 0, target, alpha);
    const double v = t.Get(0, 0, 0);
    if (v < std::min(old, target) || v > std::max(old, target)) {
      f.Add("update left [old, target]");
    }
    if (alpha == 0.0 && v != old) f.Add("alpha = 0 changed the cell");
    if (alpha == 1.0 && v != target) f.Add("alpha = 1 did not land on target");
  }

  // gamma = 0: the Nash target is the reward itself.
  for (int i = 0; i < 1000; ++i) {
    const double reward = rng.Uniform(-10.0, 10.0);
    Matrix q(3, 3);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) q(a, b) = rng.Uniform(-50.0, 50.0);
    }
    const MixedStrategy mu = MixedStrategy::Uniform(3);
    if (TdTargetNash(reward, 0.0, q, mu, mu) != reward) {
      f.Add("gamma = 0 target differs from the reward");
    }
  }
  // gamma = 0 equilibrium update equals two independent updates.
  {
    const double alpha = 0.3;
    TabularQ q1(QTable(2, 2, 2), StepSizeRule::kConstant, alpha);
    TabularQ q2(QTable(2, 2, 2), StepSizeRule::kConstant, alpha);
    QTable ref1(2, 2, 2);
    QTable ref2(2, 2, 2);
    NashSolver solver;
    for (int i = 0; i < 200; ++i) {
      Transition t;
      t.state.index = rng.UniformInt(2);
      t.next_state.index = rng.UniformInt(2);
      t.a1 = rng.UniformInt(2);
      t.a2 = rng.UniformInt(2);
      t.r1 = rng.Uniform(-1.0, 1.0);
      t.r2 = rng.Uniform(-1.0, 1.0);
      UpdateGtrl(q1, q2, t, 0.0, solver);
      ref1.Update(t.state.index, t.a1, t.a2, t.r1, alpha);
      ref2.Update(t.state.index, t.a1, t.a2, t.r2, alpha);
    }
    if (!std::equal(ref1.values().begin(), ref1.values().end(),
                    q1.table().values().begin()) ||
        !std::equal(ref2.values().begin(), ref2.values().end(),
                    q2.table().values().begin())) {
      f.Add("gamma = 0 equilibrium update differs from plain updates");
    }
  }

  // |Q_n - v| = (1 - alpha)^n |Q_0 - v|. The cases use dyadic numbers for
  // which every intermediate value is exact in binary64.
  struct Case {
    double alpha;
    double q0;
    double v;
    int n;
  };
  const Case cases[] = {{0.5, 1.0, 0.0, 50},  {0.5, -3.0, 5.0, 50},
                        {0.5, 0.0, 1.0, 50},  {0.75, 1.0, 0.0, 50},
                        {0.25, 1.0, 0.0, 33}, {1.0, 7.0, -2.0, 50}};
  for (const Case& c : cases) {
    QTable t(1, 1, 1);
    t.Set(0, 0, 0, c.q0);
    double factor = 1.0;
    for (int n = 1; n <= c.n; ++n) {
      t.Update(0, 0, 0, c.v, c.alpha);
      factor *= 1.0 - c.alpha;
      if (std::abs(t.Get(0, 0, 0) - c.v) != factor * std::abs(c.q0 - c.v)) {
        f.Add("geometric approach broken at alpha " + std::to_string(c.alpha) +
              ", n " + std::to_string(n));
        break;
      }
    }
  }

  // Independent-learner worked example: 0.5 * 0 + 0.5 * (-1 + 0.9 * 0).
  {
    TabularQ q(QTable(2, 9, 9), StepSizeRule::kConstant, 0.5);
    Transition t;
    t.state.index = 0;
    t.next_state.index = 1;
    t.a1 = 3;
    t.a2 = 5;
    t.r1 = -1.0;
    UpdateDarl(q, 1, t, 0.9);
    if (q.table().Get(0, 3, 5) != -0.5) f.Add("worked example != -0.5");
  }
  Finish(r, f, start, "all exact");
  return r;
}

SuiteResult NashQOracle(int steps, double gamma, double tolerance,
                        std::uint64_t seed) {
  SuiteResult r;
  r.name = "nash-q value-iteration oracle";
  r.time_limit_seconds = 30.0;
  const auto start = Clock::now();
  Failures f;

  const TwoByTwoMarkovGame game = PenniesAndDilemma();
  const auto oracle = JointValueIteration(game, gamma);

  AgentConfig config;
  config.algorithm = Algorithm::kGtrl;
  config.gamma = gamma;
  config.alpha_rule = StepSizeRule::kVisitCount;
  config.verify_equilibria = true;
  Learner learner(
      config,
      std::make_unique<TabularQ>(QTable(2, 2, 2), StepSizeRule::kVisitCount, 0),
      std::make_unique<TabularQ>(QTable(2, 2, 2), StepSizeRule::kVisitCount,
                                 0));
  Rng rng(seed);
  Observation obs;
  obs.index = 0;
  for (int i = 0; i < steps; ++i) {
    const JointPolicyStep p = learner.Act(obs, 1.0, rng);
    const int s = static_cast<int>(obs.index);
    Transition t;
    t.state = obs;
    t.a1 = p.a1;
    t.a2 = p.a2;
    t.r1 = game.reward[0][s](p.a1, p.a2);
    t.r2 = game.reward[1][s](p.a1, p.a2);
    t.next_state.index = game.next[s][2 * p.a1 + p.a2];
    learner.Learn(t, rng);
    obs = t.next_state;
  }

  double worst = 0.0;
  for (int s = 0; s < 2; ++s) {
    const Matrix m1 = learner.q1().QMatrix(Observation{s, {}});
    const Matrix m2 = learner.q2().QMatrix(Observation{s, {}});
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        worst = std::max(worst, std::abs(m1(a, b) - oracle[0][s](a, b)));
        worst = std::max(worst, std::abs(m2(a, b) - oracle[1][s](a, b)));
      }
    }
  }
  std::ostringstream o;
  o << "sup |Q - Q*| = " << worst << " after " << steps << " steps, "
    << learner.solver().verified() << " equilibria verified";
  if (!(worst <= tolerance)) f.Add(o.str() + " exceeds " + std::to_string(tolerance));
  Finish(r, f, start, o.str());
  return r;
}

SuiteResult GradientCheck(int num_params, double tolerance,
                          std::uint64_t seed) {
  SuiteResult r;
  r.name = "approximator gradient";
  r.time_limit_seconds = 10.0;
  const auto start = Clock::now();
  Failures f;
  Rng rng(seed);
  DenseApproximator net({8, 24, 24, 9}, rng);
  const int n = static_cast<int>(net.parameters().size());

  std::vector<std::vector<double>> inputs(16);
  std::vector<RegressionSample> batch;
  for (auto& x : inputs) {
    for (int i = 0; i < 8; ++i) x.push_back(rng.Uniform(-1.0, 1.0));
  }
  for (const auto& x : inputs) {
    batch.push_back({x, rng.UniformInt(9), rng.Uniform(-2.0, 2.0)});
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  double worst = 0.0;
  auto compare = [&](const char* when) {
    // Partial Fisher-Yates for distinct indices.
    for (int i = 0; i < num_params; ++i) {
      std::swap(all[i], all[i + rng.UniformInt(n - i)]);
    }
    const std::span<const std::size_t> picked(all.data(), num_params);
    const std::vector<double> analytic = net.Gradient(batch);
    const std::vector<double> numeric =
        FiniteDifferenceGradient(net, batch, picked, 1e-5);
    for (int i = 0; i < num_params; ++i) {
      const double g = analytic[picked[i]];
      const double d = numeric[i];
      // Relative error with a floor so exact zeros compare as equal.
      const double rel =
          std::abs(g - d) / std::max({std::abs(g), std::abs(d), 1e-8});
      worst = std::max(worst, rel);
      if (rel > tolerance) {
        f.Add(std::string(when) + ": parameter " + std::to_string(picked[i]) +
              " relative error " + std::to_string(rel));
      }
    }
  };
  compare("at initialisation");
  for (int step = 0; step < 100; ++step) {
    std::vector<RegressionSample> mini;
    for (int k = 0; k < 8; ++k) {
      mini.push_back(batch[rng.UniformInt(static_cast<int>(batch.size()))]);
    }
    net.Update(mini, 1e-2, 10.0);
  }
  compare("after 100 updates");
  std::ostringstream o;
  o << 2 * num_params << " parameters, worst relative error " << worst;
  Finish(r, f, start, o.str());
  return r;
}

std::vector<SuiteResult> RunAllSuites() {
  return {SolverSoundness(), UpdateMicroProperties(), NashQOracle(),
          GradientCheck()};
}

}  // namespace coopmarl::checks
