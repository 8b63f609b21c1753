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

#include <cmath>

#include "coopmarl/checks/oracles.h"
#include "coopmarl/error.h"
#include "coopmarl/rng.h"
#include "gtest/gtest.h"

namespace coopmarl {
namespace {

Matrix Random(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.Normal(0.0, 1.0);
  }
  return m;
}

TEST(MixedStrategyTest, RejectsBadDistributions) {
  EXPECT_THROW(MixedStrategy({0.5, 0.4}), Error);
  EXPECT_THROW(MixedStrategy({1.2, -0.2}), Error);
  EXPECT_THROW(MixedStrategy(std::vector<double>{}), Error);
  EXPECT_NO_THROW(MixedStrategy({0.5, 0.5 + 5e-10}));
}

TEST(MixedStrategyTest, PureAndSupport) {
  const MixedStrategy p = MixedStrategy::Pure(4, 2);
  EXPECT_EQ(p.Support(), std::vector<int>{2});
  EXPECT_EQ(MixedStrategy::Uniform(3).Support(), (std::vector<int>{0, 1, 2}));
}

TEST(BimatrixGameTest, RejectsShapeMismatchAndNonFinite) {
  EXPECT_THROW(BimatrixGame(Matrix(2, 2), Matrix(2, 3)), Error);
  Matrix bad(2, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(BimatrixGame(bad, Matrix(2, 2)), Error);
  bad(1, 1) = INFINITY;
  EXPECT_THROW(BimatrixGame(Matrix(2, 2), bad), Error);
}

TEST(ExpectedPayoffsTest, SingletonGame) {
  const BimatrixGame g(Matrix{{5.0}}, Matrix{{-2.0}});
  const auto [a, b] =
      ExpectedPayoffs(g, MixedStrategy::Pure(1, 0), MixedStrategy::Pure(1, 0));
  EXPECT_EQ(a, 5.0);
  EXPECT_EQ(b, -2.0);
}

TEST(ExpectedPayoffsTest, MatchingPenniesUniformIsZero) {
  const Matrix m{{1.0, -1.0}, {-1.0, 1.0}};
  const Matrix neg{{-1.0, 1.0}, {1.0, -1.0}};
  const auto [a, b] = ExpectedPayoffs(BimatrixGame(m, neg),
                                      MixedStrategy::Uniform(2),
                                      MixedStrategy::Uniform(2));
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(ExpectedPayoffsTest, MatchesDoubleLoop) {
  Rng rng(3);
  const Matrix m1 = Random(3, 3, rng);
  const Matrix m2 = Random(3, 3, rng);
  const MixedStrategy mu1({0.2, 0.5, 0.3});
  const MixedStrategy mu2({0.6, 0.1, 0.3});
  double v1 = 0.0;
  double v2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      v1 += mu1[i] * m1(i, j) * mu2[j];
      v2 += mu1[i] * m2(i, j) * mu2[j];
    }
  }
  const auto [a, b] = ExpectedPayoffs(BimatrixGame(m1, m2), mu1, mu2);
  EXPECT_NEAR(a, v1, 1e-12);
  EXPECT_NEAR(b, v2, 1e-12);
}

TEST(ExpectedPayoffsTest, DimensionMismatch) {
  const BimatrixGame g(Matrix(2, 3), Matrix(2, 3));
  EXPECT_THROW(
      ExpectedPayoffs(g, MixedStrategy::Uniform(3), MixedStrategy::Uniform(3)),
      Error);
}

TEST(SupportEnumerationTest, PrisonersDilemmaHasOnePureEquilibrium) {
  const BimatrixGame g(Matrix{{3.0, 0.0}, {5.0, 1.0}},
                       Matrix{{3.0, 5.0}, {0.0, 1.0}});
  const auto eqs = SolveSupportEnumeration(g);
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_EQ(eqs[0].mu1, MixedStrategy::Pure(2, 1));
  EXPECT_EQ(eqs[0].mu2, MixedStrategy::Pure(2, 1));
  EXPECT_EQ(eqs[0].payoff1, 1.0);
}

TEST(SupportEnumerationTest, MatchingPenniesIsUniform) {
  const BimatrixGame g(Matrix{{1.0, -1.0}, {-1.0, 1.0}},
                       Matrix{{-1.0, 1.0}, {1.0, -1.0}});
  const auto eqs = SolveSupportEnumeration(g);
  ASSERT_EQ(eqs.size(), 1u);
  EXPECT_NEAR(eqs[0].mu1[0], 0.5, 1e-12);
  EXPECT_NEAR(eqs[0].mu2[0], 0.5, 1e-12);
  EXPECT_NEAR(eqs[0].payoff1, 0.0, 1e-12);
}

TEST(SupportEnumerationTest, BattleOfTheSexesHasThree) {
  const BimatrixGame g(Matrix{{3.0, 0.0}, {0.0, 2.0}},
                       Matrix{{2.0, 0.0}, {0.0, 3.0}});
  const auto eqs = SolveSupportEnumeration(g);
  ASSERT_EQ(eqs.size(), 3u);
  const EquilibriumProfile best = SelectEquilibrium(eqs);
  // Both pure equilibria sum to 5; the first agent's payoff breaks the tie.
  EXPECT_EQ(best.mu1, MixedStrategy::Pure(2, 0));
  EXPECT_EQ(best.mu2, MixedStrategy::Pure(2, 0));
}

TEST(SupportEnumerationTest, RejectsOversizedGames) {
  const BimatrixGame g(Matrix(17, 2), Matrix(17, 2));
  try {
    SolveSupportEnumeration(g);
    FAIL() << "expected unsupported-size";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kUnsupportedSize);
  }
  SolverOptions small;
  small.max_actions = 3;
  EXPECT_THROW(SolveSupportEnumeration(BimatrixGame(Matrix(4, 2), Matrix(4, 2)),
                                       small),
               Error);
}

TEST(SupportEnumerationTest, AllZeroGameIsSolvedDeterministically) {
  const BimatrixGame g(Matrix(9, 9), Matrix(9, 9));
  const auto a = SolveAndSelect(g);
  const auto b = SolveAndSelect(g);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->mu1, b->mu1);
  EXPECT_EQ(a->mu2, b->mu2);
  EXPECT_TRUE(VerifyEquilibrium(g, *a, 1e-9));
}

TEST(SupportEnumerationTest, RandomGamesVerify) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + rng.UniformInt(5);
    const int c = 1 + rng.UniformInt(5);
    const BimatrixGame g(Random(r, c, rng), Random(r, c, rng));
    const auto eqs = SolveSupportEnumeration(g);
    ASSERT_FALSE(eqs.empty());
    for (const auto& e : eqs) {
      EXPECT_TRUE(VerifyEquilibrium(g, e, 1e-9));
      const auto [v1, v2] = ExpectedPayoffs(g, e.mu1, e.mu2);
      EXPECT_NEAR(v1, e.payoff1, 1e-9);
      EXPECT_NEAR(v2, e.payoff2, 1e-9);
    }
  }
}

TEST(SupportEnumerationTest, TwoByTwoMatchesBruteForce) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix a = Random(2, 2, rng);
    const Matrix b = Random(2, 2, rng);
    const auto eqs = SolveSupportEnumeration(BimatrixGame(a, b));
    const auto oracle = checks::BruteForce2x2(a, b);
    ASSERT_EQ(eqs.size(), oracle.size());
    for (const auto& o : oracle) {
      bool found = false;
      for (const auto& e : eqs) {
        found = found || (std::abs(e.mu1[0] - o.p) <= 1e-8 &&
                          std::abs(e.mu2[0] - o.q) <= 1e-8);
      }
      EXPECT_TRUE(found);
    }
    const auto chosen = SelectEquilibrium(eqs);
    const auto expected = checks::SelectUtilitarian2x2(oracle);
    EXPECT_NEAR(chosen.mu1[0], expected.p, 1e-8);
    EXPECT_NEAR(chosen.mu2[0], expected.q, 1e-8);
  }
}

TEST(SupportEnumerationTest, DominanceEliminationDoesNotChangeTheSet) {
  Rng rng(5);
  SolverOptions plain;
  plain.eliminate_dominated = false;
  for (int trial = 0; trial < 100; ++trial) {
    const BimatrixGame g(Random(4, 4, rng), Random(4, 4, rng));
    const auto with = SolveSupportEnumeration(g);
    const auto without = SolveSupportEnumeration(g, plain);
    ASSERT_EQ(with.size(), without.size());
    const auto a = SelectEquilibrium(with);
    const auto b = SelectEquilibrium(without);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(a.mu1[i], b.mu1[i], 1e-9);
      EXPECT_NEAR(a.mu2[i], b.mu2[i], 1e-9);
    }
  }
}

TEST(SupportEnumerationTest, SolveAndSelectAgreesWithFullSelection) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + rng.UniformInt(8);
    const BimatrixGame g(Random(n, n, rng), Random(n, n, rng));
    const auto best = SolveAndSelect(g);
    ASSERT_TRUE(best);
    const auto all = SelectEquilibrium(SolveSupportEnumeration(g));
    EXPECT_EQ(best->mu1, all.mu1);
    EXPECT_EQ(best->mu2, all.mu2);
  }
}

TEST(SelectEquilibriumTest, IsATotalOrder) {
  const EquilibriumProfile a{MixedStrategy::Pure(2, 0), MixedStrategy::Pure(2, 1),
                             1.0, 1.0};
  const EquilibriumProfile b{MixedStrategy::Pure(2, 1), MixedStrategy::Pure(2, 0),
                             1.0, 1.0};
  EXPECT_NE(RanksAbove(a, b), RanksAbove(b, a));
  EXPECT_FALSE(RanksAbove(a, a));
  EXPECT_THROW(SelectEquilibrium({}), Error);
}

TEST(VerifyEquilibriumTest, DetectsProfitableDeviation) {
  const BimatrixGame g(Matrix{{3.0, 0.0}, {5.0, 1.0}},
                       Matrix{{3.0, 5.0}, {0.0, 1.0}});
  const EquilibriumProfile cooperate{MixedStrategy::Pure(2, 0),
                                     MixedStrategy::Pure(2, 0), 3.0, 3.0};
  EXPECT_FALSE(VerifyEquilibrium(g, cooperate, 1e-9));
}

TEST(SupportEnumerationTest, PositiveAffineInvariance) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = Random(3, 3, rng);
    const Matrix b = Random(3, 3, rng);
    Matrix a2 = a;
    Matrix b2 = b;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a2(i, j) = 4.0 * a(i, j) - 3.0;
        b2(i, j) = 4.0 * b(i, j) - 3.0;
      }
    }
    const auto e1 = SolveSupportEnumeration(BimatrixGame(a, b));
    const auto e2 = SolveSupportEnumeration(BimatrixGame(a2, b2));
    ASSERT_EQ(e1.size(), e2.size());
    for (std::size_t k = 0; k < e1.size(); ++k) {
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(e1[k].mu1[i], e2[k].mu1[i], 1e-9);
        EXPECT_NEAR(e1[k].mu2[i], e2[k].mu2[i], 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace coopmarl
