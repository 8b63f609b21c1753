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


#include "coopmarl/checks/oracles.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopmarl::checks {
namespace {

double Bilinear(const Matrix& m, double p, double q) {
  return p * q * m(0, 0) + p * (1 - q) * m(0, 1) + (1 - p) * q * m(1, 0) +
         (1 - p) * (1 - q) * m(1, 1);
}

bool Above(const Equilibrium2x2& x, const Equilibrium2x2& y) {
  const double sx = x.payoff1 + x.payoff2;
  const double sy = y.payoff1 + y.payoff2;
  if (sx != sy) return sx > sy;
  if (x.payoff1 != y.payoff1) return x.payoff1 > y.payoff1;
  const std::array<double, 4> kx{x.p, 1 - x.p, x.q, 1 - x.q};
  const std::array<double, 4> ky{y.p, 1 - y.p, y.q, 1 - y.q};
  return kx > ky;
}

}  // namespace

std::vector<Equilibrium2x2> BruteForce2x2(const Matrix& a, const Matrix& b) {
  if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2) {
    throw std::invalid_argument("BruteForce2x2 needs 2x2 matrices");
  }
  std::vector<Equilibrium2x2> out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const bool row_best = a(i, j) >= a(1 - i, j);
      const bool col_best = b(i, j) >= b(i, 1 - j);
      if (row_best && col_best) {
        out.push_back({i == 0 ? 1.0 : 0.0, j == 0 ? 1.0 : 0.0, a(i, j),
                       b(i, j)});
      }
    }
  }
  // Column player indifferent: p b00 + (1-p) b10 = p b01 + (1-p) b11.
  const double dp = (b(0, 0) - b(0, 1)) - (b(1, 0) - b(1, 1));
  // Row player indifferent: q a00 + (1-q) a01 = q a10 + (1-q) a11.
  const double dq = (a(0, 0) - a(1, 0)) - (a(0, 1) - a(1, 1));
  if (dp != 0.0 && dq != 0.0) {
    const double p = (b(1, 1) - b(1, 0)) / dp;
    const double q = (a(1, 1) - a(0, 1)) / dq;
    if (p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) {
      out.push_back({p, q, Bilinear(a, p, q), Bilinear(b, p, q)});
    }
  }
  return out;
}

Equilibrium2x2 SelectUtilitarian2x2(std::span<const Equilibrium2x2> eqs) {
  if (eqs.empty()) throw std::invalid_argument("no equilibria");
  Equilibrium2x2 best = eqs.front();
  for (const Equilibrium2x2& e : eqs) {
    if (Above(e, best)) best = e;
  }
  return best;
}

TwoByTwoMarkovGame PenniesAndDilemma() {
  TwoByTwoMarkovGame g;
  g.num_states = 2;
  g.reward[0] = {Matrix{{3.0, 0.0}, {5.0, 1.0}}, Matrix{{1.0, -1.0}, {-1.0, 1.0}}};
  g.reward[1] = {Matrix{{3.0, 5.0}, {0.0, 1.0}}, Matrix{{-1.0, 1.0}, {1.0, -1.0}}};
  for (int s = 0; s < 2; ++s) {
    g.next.push_back({s, 1 - s, 1 - s, s});
  }
  return g;
}

std::array<std::vector<Matrix>, 2> JointValueIteration(
    const TwoByTwoMarkovGame& game, double gamma, double tol, int max_sweeps) {
  std::array<std::vector<Matrix>, 2> q = game.reward;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::vector<std::array<double, 2>> v(game.num_states);
    for (int s = 0; s < game.num_states; ++s) {
      const auto eqs = BruteForce2x2(q[0][s], q[1][s]);
      if (eqs.empty()) throw std::runtime_error("state game without equilibrium");
      const Equilibrium2x2 e = SelectUtilitarian2x2(eqs);
      v[s] = {e.payoff1, e.payoff2};
    }
    double change = 0.0;
    for (int k = 0; k < 2; ++k) {
      for (int s = 0; s < game.num_states; ++s) {
        for (int a1 = 0; a1 < 2; ++a1) {
          for (int a2 = 0; a2 < 2; ++a2) {
            const double target = game.reward[k][s](a1, a2) +
                                  gamma * v[game.next[s][2 * a1 + a2]][k];
            change = std::max(change, std::abs(target - q[k][s](a1, a2)));
            q[k][s](a1, a2) = target;
          }
        }
      }
    }
    if (change < tol) return q;
  }
  throw std::runtime_error("value iteration did not converge");
}

std::vector<double> FiniteDifferenceGradient(
    const DenseApproximator& net, std::span<const RegressionSample> batch,
    std::span<const std::size_t> indices, double h) {
  DenseApproximator probe = net;
  std::vector<double> out;
  for (std::size_t i : indices) {
    double& w = probe.mutable_parameters()[i];
    const double saved = w;
    w = saved + h;
    const double up = probe.Loss(batch);
    w = saved - h;
    const double down = probe.Loss(batch);
    w = saved;
    out.push_back((up - down) / (2 * h));
  }
  return out;
}

}  // namespace coopmarl::checks
