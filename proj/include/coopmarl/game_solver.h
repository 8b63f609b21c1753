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

#ifndef COOPMARL_GAME_SOLVER_H_
#define COOPMARL_GAME_SOLVER_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "coopmarl/matrix.h"

// Exact Nash equilibria of two-player general-sum bimatrix games.
//
// Player 1 chooses rows, player 2 chooses columns. The payoff to player k
// under mixed strategies (x, y) is the bilinear form x^T M_k y.

namespace coopmarl {

inline constexpr double kStrategySumTolerance = 1e-9;

// Probability distribution over one player's actions.
class MixedStrategy {
 public:
  // Throws kInvalidArgument unless every entry is in [0, 1] and the entries
  // sum to 1 within kStrategySumTolerance.
  explicit MixedStrategy(std::vector<double> probs);

  static MixedStrategy Pure(int num_actions, int action);
  static MixedStrategy Uniform(int num_actions);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  // Indices with probability above `tol`.
  std::vector<int> Support(double tol = 1e-9) const;

  bool operator==(const MixedStrategy&) const = default;

 private:
  std::vector<double> probs_;
};

class BimatrixGame {
 public:
  // Throws kInvalidArgument on shape mismatch, empty matrices or non-finite
  // entries.
  BimatrixGame(Matrix payoff1, Matrix payoff2);

  int num_rows() const { return payoff1_.rows(); }
  int num_cols() const { return payoff1_.cols(); }
  const Matrix& payoff1() const { return payoff1_; }
  const Matrix& payoff2() const { return payoff2_; }

 private:
  Matrix payoff1_;
  Matrix payoff2_;
};

struct EquilibriumProfile {
  MixedStrategy mu1;
  MixedStrategy mu2;
  double payoff1 = 0.0;
  double payoff2 = 0.0;
};

// (x^T M1 y, x^T M2 y). Throws kInvalidArgument on dimension mismatch.
std::pair<double, double> ExpectedPayoffs(const BimatrixGame& game,
                                          const MixedStrategy& mu1,
                                          const MixedStrategy& mu2);

struct SolverOptions {
  // Either dimension above this raises kUnsupportedSize.
  int max_actions = 16;
  // Indifference systems with a pivot below this are treated as singular and
  // their support pair is skipped.
  double pivot_tolerance = 1e-10;
  // Slack for probability non-negativity and best-response conditions.
  double feasibility_tolerance = 1e-10;
  // Remove strictly dominated actions before enumerating supports. Strictly
  // dominated actions carry zero weight in every equilibrium.
  bool eliminate_dominated = true;
};

// All equilibria reachable through equal-size support pairs, in enumeration
// order (support size, then row support, then column support, each
// lexicographic). Duplicates are removed. Non-empty for every game in which
// some support system is non-singular, which includes all games with a pure
// equilibrium.
std::vector<EquilibriumProfile> SolveSupportEnumeration(
    const BimatrixGame& game, const SolverOptions& options = {});

// Utilitarian choice: maximal payoff1 + payoff2, ties broken by payoff1 and
// then by the lexicographically larger concatenation (mu1, mu2). The order is
// total, so the result does not depend on candidate order. Throws
// kInvalidArgument on an empty list.
EquilibriumProfile SelectEquilibrium(
    std::span<const EquilibriumProfile> candidates);

// Returns true iff the first profile ranks strictly above the second under
// the SelectEquilibrium order.
bool RanksAbove(const EquilibriumProfile& a, const EquilibriumProfile& b);

// Same result as SelectEquilibrium(SolveSupportEnumeration(game)), but skips
// support pairs whose best attainable payoff sum cannot reach the incumbent.
// Candidates whose sum could exceed the incumbent's by at most 1e-9 are also
// skipped when the strategy tie-break already favours the incumbent, so
// near-ties may resolve differently from the exhaustive path. Returns nullopt
// when enumeration finds nothing.
std::optional<EquilibriumProfile> SolveAndSelect(
    const BimatrixGame& game, const SolverOptions& options = {});

// True iff no pure deviation by either player gains more than `tol`.
// Checking pure deviations suffices because payoffs are linear in each
// player's own strategy.
bool VerifyEquilibrium(const BimatrixGame& game,
                       const EquilibriumProfile& profile, double tol);

}  // namespace coopmarl

#endif  // COOPMARL_GAME_SOLVER_H_
