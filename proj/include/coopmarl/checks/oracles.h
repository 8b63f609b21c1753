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


#ifndef COOPMARL_CHECKS_ORACLES_H_
#define COOPMARL_CHECKS_ORACLES_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "coopmarl/game_solver.h"
#include "coopmarl/qfunction.h"

// Reference computations written without the library's solver or learners.
// Tests and `coopmarl verify` compare the library against these.

namespace coopmarl::checks {

// A 2x2 equilibrium as plain numbers: p = P(row 0), q = P(col 0).
struct Equilibrium2x2 {
  double p = 0.0;
  double q = 0.0;
  double payoff1 = 0.0;
  double payoff2 = 0.0;
};

// All equilibria of a 2x2 game with supports of equal size: the pure cells
// that are mutual best responses, plus the fully mixed point from the two
// indifference conditions when it lies strictly inside the square.
std::vector<Equilibrium2x2> BruteForce2x2(const Matrix& a, const Matrix& b);

// Highest payoff sum, then payoff1, then the lexicographically larger
// (p, 1 - p, q, 1 - q).
Equilibrium2x2 SelectUtilitarian2x2(std::span<const Equilibrium2x2> eqs);

// Two-player Markov game with two actions each and deterministic moves.
struct TwoByTwoMarkovGame {
  int num_states = 0;
  // reward[k][s] is agent k's 2x2 payoff at state s.
  std::array<std::vector<Matrix>, 2> reward;
  // next[s][2 * a1 + a2].
  std::vector<std::array<int, 4>> next;
};

// The two-state game used by the Nash-Q checks: a prisoner's dilemma state
// and a matching-pennies state, moving between them whenever the actions
// differ.
TwoByTwoMarkovGame PenniesAndDilemma();

// Joint value iteration: Q_k(s, a) = R_k(s, a) + gamma V_k(next(s, a)) with
// V_k(s) the utilitarian equilibrium payoff of (Q_1(s), Q_2(s)), each game
// solved by BruteForce2x2. Returns Q[k][s].
std::array<std::vector<Matrix>, 2> JointValueIteration(
    const TwoByTwoMarkovGame& game, double gamma, double tol = 1e-13,
    int max_sweeps = 100000);

// Central differences of DenseApproximator::Loss at the listed parameters.
std::vector<double> FiniteDifferenceGradient(
    const DenseApproximator& net, std::span<const RegressionSample> batch,
    std::span<const std::size_t> indices, double h);

}  // namespace coopmarl::checks

#endif  // COOPMARL_CHECKS_ORACLES_H_
