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

#include "coopmarl/game_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "coopmarl/error.h"

namespace coopmarl {
namespace {

constexpr double kDuplicateTolerance = 1e-9;
// Slack on the payoff-sum bound used by SolveAndSelect. Far above rounding
// noise of a bilinear form over at most 16x16 entries, far below any real
// payoff difference.
constexpr double kBoundSlack = 1e-9;

// Gaussian elimination with partial pivoting on an n x n row-major system.
// Overwrites `b` with the solution. Returns false on a pivot below `tol`.
bool SolveLinearSystem(std::vector<double>& a, std::vector<double>& b, int n,
                       double tol) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < tol) return false;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
  return true;
}

// Advances `idx` (a sorted k-subset of [0, n)) to its lexicographic
// successor. Returns false after the last subset.
bool NextCombination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

std::vector<int> FirstCombination(int k) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  return idx;
}

// Game restricted to surviving actions, with maps back to original indices.
struct ReducedGame {
  Matrix m1;
  Matrix m2;
  std::vector<int> rows;
  std::vector<int> cols;
};

// `a` strictly dominates `b` by more than tol on every listed opponent action.
bool RowDominates(const Matrix& m, int a, int b, const std::vector<int>& cols,
                  double tol) {
  for (int c : cols) {
    if (!(m(a, c) - m(b, c) > tol)) return false;
  }
  return true;
}

bool ColDominates(const Matrix& m, int a, int b, const std::vector<int>& rows,
                  double tol) {
  for (int r : rows) {
    if (!(m(r, a) - m(r, b) > tol)) return false;
  }
  return true;
}

ReducedGame Reduce(const BimatrixGame& game, const SolverOptions& options) {
  std::vector<int> rows(game.num_rows());
  std::vector<int> cols(game.num_cols());
  for (int i = 0; i < game.num_rows(); ++i) rows[i] = i;
  for (int j = 0; j < game.num_cols(); ++j) cols[j] = j;
  const Matrix& m1 = game.payoff1();
  const Matrix& m2 = game.payoff2();
  const double tol = options.feasibility_tolerance;

  bool changed = options.eliminate_dominated;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows.size() && rows.size() > 1; ++i) {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k != i && RowDominates(m1, rows[k], rows[i], cols, tol)) {
          rows.erase(rows.begin() + i);
          --i;
          changed = true;
          break;
        }
      }
    }
    for (std::size_t j = 0; j < cols.size() && cols.size() > 1; ++j) {
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k != j && ColDominates(m2, cols[k], cols[j], rows, tol)) {
          cols.erase(cols.begin() + j);
          --j;
          changed = true;
          break;
        }
      }
    }
  }

  ReducedGame reduced{Matrix(rows.size(), cols.size()),
                      Matrix(rows.size(), cols.size()), rows, cols};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      reduced.m1(i, j) = m1(rows[i], cols[j]);
      reduced.m2(i, j) = m2(rows[i], cols[j]);
    }
  }
  return reduced;
}

// Clamps solver round-off below zero and renormalises.
std::vector<double> Normalised(std::vector<double> p) {
  double total = 0.0;
  for (double& v : p) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

bool SameProfile(const EquilibriumProfile& a, const EquilibriumProfile& b) {
  for (int i = 0; i < a.mu1.size(); ++i) {
    if (std::abs(a.mu1[i] - b.mu1[i]) > kDuplicateTolerance) return false;
  }
  for (int j = 0; j < a.mu2.size(); ++j) {
    if (std::abs(a.mu2[j] - b.mu2[j]) > kDuplicateTolerance) return false;
  }
  return true;
}

// Walks every equal-size support pair of the reduced game. `skip_rows(I, C)`
// (C: columns that can still pair with I) and `skip(I, J)` may veto supports
// before any linear algebra; `emit(profile)` receives each equilibrium in
// original coordinates.
template <typename SkipRows, typename Skip, typename Emit>
void EnumerateSupports(const BimatrixGame& game, const ReducedGame& g,
                       const SolverOptions& options, SkipRows skip_rows,
                       Skip skip, Emit emit) {
  const int n = g.m1.rows();
  const int m = g.m1.cols();
  const double tol = options.feasibility_tolerance;
  // beats1[a * n + b]: bit c set when row a beats row b at column c by more
  // than tol. beats2 likewise for columns, indexed by row. Dominance over a
  // support is then a mask test.
  std::vector<std::uint32_t> beats1(static_cast<std::size_t>(n) * n, 0);
  std::vector<std::uint32_t> beats2(static_cast<std::size_t>(m) * m, 0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < m; ++c) {
        if (g.m1(a, c) - g.m1(b, c) > tol) beats1[a * n + b] |= 1u << c;
      }
    }
  }
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      for (int r = 0; r < n; ++r) {
        if (g.m2(r, a) - g.m2(r, b) > tol) beats2[a * m + b] |= 1u << r;
      }
    }
  }
  std::vector<double> system;
  std::vector<double> rhs;
  std::vector<int> candidate_cols;
  candidate_cols.reserve(m);

  for (int k = 1; k <= std::min(n, m); ++k) {
    const int dim = k + 1;
    std::vector<int> rows_support = FirstCombination(k);
    do {
      std::uint32_t rows_mask = 0;
      for (int r : rows_support) rows_mask |= 1u << r;
      // Columns that are strictly worse for player 2 than some other column
      // against every mixture over rows_support never enter a best response.
      candidate_cols.clear();
      for (int c = 0; c < m; ++c) {
        bool dominated = false;
        for (int other = 0; other < m && !dominated; ++other) {
          dominated = other != c && (rows_mask & ~beats2[other * m + c]) == 0;
        }
        if (!dominated) candidate_cols.push_back(c);
      }
      const int num_candidates = static_cast<int>(candidate_cols.size());
      if (num_candidates < k) continue;
      if (skip_rows(rows_support, candidate_cols)) continue;

      std::vector<int> pick = FirstCombination(k);
      std::vector<int> cols_support(k);
      do {
        for (int t = 0; t < k; ++t) cols_support[t] = candidate_cols[pick[t]];
        if (skip(rows_support, cols_support)) continue;

        std::uint32_t cols_mask = 0;
        for (int c : cols_support) cols_mask |= 1u << c;
        bool row_dominated = false;
        for (int r : rows_support) {
          for (int other = 0; other < n && !row_dominated; ++other) {
            row_dominated =
                other != r && (cols_mask & ~beats1[other * n + r]) == 0;
          }
          if (row_dominated) break;
        }
        if (row_dominated) continue;

        // Player 2's mixture y makes player 1 indifferent over rows_support:
        //   sum_c M1[r][c] y_c - v = 0 for r in I,  sum_c y_c = 1.
        system.assign(dim * dim, 0.0);
        rhs.assign(dim, 0.0);
        for (int t = 0; t < k; ++t) {
          for (int s = 0; s < k; ++s) {
            system[t * dim + s] = g.m1(rows_support[t], cols_support[s]);
          }
          system[t * dim + k] = -1.0;
          system[k * dim + t] = 1.0;
        }
        rhs[k] = 1.0;
        if (!SolveLinearSystem(system, rhs, dim, options.pivot_tolerance)) {
          continue;
        }
        std::vector<double> y(rhs.begin(), rhs.begin() + k);
        const double v1 = rhs[k];
        if (std::any_of(y.begin(), y.end(),
                        [tol](double p) { return p < -tol; })) {
          continue;
        }
        bool ok = true;
        for (int r = 0; r < n && ok; ++r) {
          double value = 0.0;
          for (int s = 0; s < k; ++s) value += g.m1(r, cols_support[s]) * y[s];
          ok = value <= v1 + tol;
        }
        if (!ok) continue;

        // Player 1's mixture x makes player 2 indifferent over cols_support.
        system.assign(dim * dim, 0.0);
        rhs.assign(dim, 0.0);
        for (int t = 0; t < k; ++t) {
          for (int s = 0; s < k; ++s) {
            system[t * dim + s] = g.m2(rows_support[s], cols_support[t]);
          }
          system[t * dim + k] = -1.0;
          system[k * dim + t] = 1.0;
        }
        rhs[k] = 1.0;
        if (!SolveLinearSystem(system, rhs, dim, options.pivot_tolerance)) {
          continue;
        }
        std::vector<double> x(rhs.begin(), rhs.begin() + k);
        const double v2 = rhs[k];
        if (std::any_of(x.begin(), x.end(),
                        [tol](double p) { return p < -tol; })) {
          continue;
        }
        for (int c = 0; c < m && ok; ++c) {
          double value = 0.0;
          for (int s = 0; s < k; ++s) value += g.m2(rows_support[s], c) * x[s];
          ok = value <= v2 + tol;
        }
        if (!ok) continue;

        std::vector<double> full1(game.num_rows(), 0.0);
        std::vector<double> full2(game.num_cols(), 0.0);
        x = Normalised(std::move(x));
        y = Normalised(std::move(y));
        for (int t = 0; t < k; ++t) {
          full1[g.rows[rows_support[t]]] = x[t];
          full2[g.cols[cols_support[t]]] = y[t];
        }
        MixedStrategy mu1(std::move(full1));
        MixedStrategy mu2(std::move(full2));
        const auto [p1, p2] = ExpectedPayoffs(game, mu1, mu2);
        emit(EquilibriumProfile{std::move(mu1), std::move(mu2), p1, p2});
      } while (NextCombination(pick, num_candidates));
    } while (NextCombination(rows_support, n));
  }
}

void CheckSolvable(const BimatrixGame& game, const SolverOptions& options) {
  if (game.num_rows() > options.max_actions ||
      game.num_cols() > options.max_actions) {
    Fail(ErrorCategory::kUnsupportedSize,
         "bimatrix game " + std::to_string(game.num_rows()) + "x" +
             std::to_string(game.num_cols()) + " exceeds the solver cap of " +
             std::to_string(options.max_actions) + " actions per player");
  }
}

}  // namespace

MixedStrategy::MixedStrategy(std::vector<double> probs)
    : probs_(std::move(probs)) {
  Check(!probs_.empty(), ErrorCategory::kInvalidArgument,
        "mixed strategy over zero actions");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      Fail(ErrorCategory::kInvalidArgument,
           "strategy entry " + std::to_string(p) + " outside [0, 1]");
    }
    total += p;
  }
  if (!(std::abs(total - 1.0) <= kStrategySumTolerance)) {
    Fail(ErrorCategory::kInvalidArgument,
         "strategy entries sum to " + std::to_string(total));
  }
}

MixedStrategy MixedStrategy::Pure(int num_actions, int action) {
  Check(action >= 0 && action < num_actions, ErrorCategory::kInvalidArgument,
        "pure action out of range");
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::Uniform(int num_actions) {
  Check(num_actions > 0, ErrorCategory::kInvalidArgument,
        "uniform strategy over zero actions");
  return MixedStrategy(std::vector<double>(num_actions, 1.0 / num_actions));
}

std::vector<int> MixedStrategy::Support(double tol) const {
  std::vector<int> support;
  for (int i = 0; i < size(); ++i) {
    if (probs_[i] > tol) support.push_back(i);
  }
  return support;
}

BimatrixGame::BimatrixGame(Matrix payoff1, Matrix payoff2)
    : payoff1_(std::move(payoff1)), payoff2_(std::move(payoff2)) {
  Check(payoff1_.rows() > 0 && payoff1_.cols() > 0,
        ErrorCategory::kInvalidArgument, "empty payoff matrix");
  Check(payoff1_.rows() == payoff2_.rows() &&
            payoff1_.cols() == payoff2_.cols(),
        ErrorCategory::kInvalidArgument, "payoff matrices differ in shape");
  for (const Matrix* m : {&payoff1_, &payoff2_}) {
    for (double v : m->data()) {
      Check(std::isfinite(v), ErrorCategory::kInvalidArgument,
            "non-finite payoff entry");
    }
  }
}

std::pair<double, double> ExpectedPayoffs(const BimatrixGame& game,
                                          const MixedStrategy& mu1,
                                          const MixedStrategy& mu2) {
  Check(mu1.size() == game.num_rows() && mu2.size() == game.num_cols(),
        ErrorCategory::kInvalidArgument,
        "strategy sizes do not match the game dimensions");
  double p1 = 0.0;
  double p2 = 0.0;
  for (int i = 0; i < game.num_rows(); ++i) {
    if (mu1[i] == 0.0) continue;
    double row1 = 0.0;
    double row2 = 0.0;
    for (int j = 0; j < game.num_cols(); ++j) {
      row1 += game.payoff1()(i, j) * mu2[j];
      row2 += game.payoff2()(i, j) * mu2[j];
    }
    p1 += mu1[i] * row1;
    p2 += mu1[i] * row2;
  }
  return {p1, p2};
}

std::vector<EquilibriumProfile> SolveSupportEnumeration(
    const BimatrixGame& game, const SolverOptions& options) {
  CheckSolvable(game, options);
  const ReducedGame reduced = Reduce(game, options);
  std::vector<EquilibriumProfile> found;
  EnumerateSupports(
      game, reduced, options,
      [](const std::vector<int>&, const std::vector<int>&) { return false; },
      [](const std::vector<int>&, const std::vector<int>&) { return false; },
      [&found](EquilibriumProfile profile) {
        for (const EquilibriumProfile& seen : found) {
          if (SameProfile(seen, profile)) return;
        }
        found.push_back(std::move(profile));
      });
  return found;
}

bool RanksAbove(const EquilibriumProfile& a, const EquilibriumProfile& b) {
  const double sum_a = a.payoff1 + a.payoff2;
  const double sum_b = b.payoff1 + b.payoff2;
  if (sum_a != sum_b) return sum_a > sum_b;
  if (a.payoff1 != b.payoff1) return a.payoff1 > b.payoff1;
  if (a.mu1.probs() != b.mu1.probs()) return a.mu1.probs() > b.mu1.probs();
  return a.mu2.probs() > b.mu2.probs();
}

EquilibriumProfile SelectEquilibrium(
    std::span<const EquilibriumProfile> candidates) {
  Check(!candidates.empty(), ErrorCategory::kInvalidArgument,
        "no equilibrium candidates to select from");
  const EquilibriumProfile* best = &candidates.front();
  for (const EquilibriumProfile& c : candidates.subspan(1)) {
    if (RanksAbove(c, *best)) best = &c;
  }
  return *best;
}

std::optional<EquilibriumProfile> SolveAndSelect(const BimatrixGame& game,
                                                 const SolverOptions& options) {
  CheckSolvable(game, options);
  const ReducedGame reduced = Reduce(game, options);
  std::optional<EquilibriumProfile> best;
  // Upper bounds on the payoffs of any equilibrium on a support pair (I, J).
  // Indifference makes payoff1 the value of every row in I, so it is at most
  // the smallest row maximum over J; payoff2 likewise with columns.
  // col_max[c] holds max over I of m2(r, c) for the current I.
  std::vector<double> col_max(reduced.m1.cols());
  std::vector<double> open_max;
  auto row_bound = [&](const std::vector<int>& rows,
                       const std::vector<int>& cols) {
    double v1 = std::numeric_limits<double>::infinity();
    for (int r : rows) {
      double row_max = -std::numeric_limits<double>::infinity();
      for (int c : cols) row_max = std::max(row_max, reduced.m1(r, c));
      v1 = std::min(v1, row_max);
    }
    return v1;
  };
  // A mixture over a support of size >= 2 starting at original index `first`
  // is lexicographically below the pure strategy on `first`; this checks
  // whether the incumbent is at least that pure strategy.
  auto at_least_pure = [](const MixedStrategy& mu, int first) {
    for (int i = 0; i < first; ++i) {
      if (mu[i] > 0.0) return true;
    }
    return mu[first] == 1.0;
  };
  EnumerateSupports(
      game, reduced, options,
      [&](const std::vector<int>& rows, const std::vector<int>& open) {
        for (int c : open) {
          double v = -std::numeric_limits<double>::infinity();
          for (int r : rows) v = std::max(v, reduced.m2(r, c));
          col_max[c] = v;
        }
        if (!best || rows.size() < 2) return false;
        // J is k columns from `open`, so payoff2 is at most the k-th largest
        // col_max among them.
        open_max.clear();
        for (int c : open) open_max.push_back(col_max[c]);
        const std::size_t k = rows.size();
        std::nth_element(open_max.begin(), open_max.begin() + (k - 1),
                         open_max.end(), std::greater<>());
        const double v1 = row_bound(rows, open);
        const double sum = v1 + open_max[k - 1];
        const double best_sum = best->payoff1 + best->payoff2;
        if (sum + kBoundSlack < best_sum) return true;
        // Payoff ties within the slack go to the incumbent when no profile
        // on these rows can win the strategy comparison.
        return sum <= best_sum + kBoundSlack &&
               v1 <= best->payoff1 + kBoundSlack &&
               at_least_pure(best->mu1, reduced.rows[rows.front()]);
      },
      [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        if (!best) return false;
        double v2 = std::numeric_limits<double>::infinity();
        for (int c : cols) v2 = std::min(v2, col_max[c]);
        return row_bound(rows, cols) + v2 + kBoundSlack <
               best->payoff1 + best->payoff2;
      },
      [&best](EquilibriumProfile profile) {
        if (!best || RanksAbove(profile, *best)) best = std::move(profile);
      });
  return best;
}

bool VerifyEquilibrium(const BimatrixGame& game,
                       const EquilibriumProfile& profile, double tol) {
  const auto [p1, p2] = ExpectedPayoffs(game, profile.mu1, profile.mu2);
  for (int i = 0; i < game.num_rows(); ++i) {
    double deviation = 0.0;
    for (int j = 0; j < game.num_cols(); ++j) {
      deviation += game.payoff1()(i, j) * profile.mu2[j];
    }
    if (deviation > p1 + tol) return false;
  }
  for (int j = 0; j < game.num_cols(); ++j) {
    double deviation = 0.0;
    for (int i = 0; i < game.num_rows(); ++i) {
      deviation += profile.mu1[i] * game.payoff2()(i, j);
    }
    if (deviation > p2 + tol) return false;
  }
  return true;
}

}  // namespace coopmarl
