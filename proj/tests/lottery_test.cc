// Copyright 2026 The mlot Authors
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

#include "mlot/lottery.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "mlot/rng.h"
#include "oracles.h"

namespace mlot {
namespace {

using testing::EnMatrix;
using testing::EsMatrix;
using testing::Mm;
using testing::PureGuarantee;
using testing::RandomSkew;

double Sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

TEST(MaximalLotteryTest, CondorcetWinnerGetsPointMass) {
  const Lottery p = MaximalLottery(Mm(EnMatrix()));
  EXPECT_EQ(p.roster, testing::ThreeRoster());
  EXPECT_NEAR(p.probs[0], 1.0, 1e-9);
  EXPECT_NEAR(p.probs[1], 0.0, 1e-9);
  EXPECT_NEAR(p.probs[2], 0.0, 1e-9);
  EXPECT_EQ(p.Support(), (std::vector<std::size_t>{0}));
  EXPECT_NEAR(p.value, 0.0, kFeasTol);
}

TEST(MaximalLotteryTest, SymmetricCycleIsUniform) {
  const Lottery p = MaximalLottery(Mm(EsMatrix()));
  for (double x : p.probs) EXPECT_NEAR(x, 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(p.value, 0.0, kFeasTol);
}

TEST(MaximalLotteryTest, PairWithPositiveMargin) {
  const Lottery p = MaximalLottery(Mm(Matrix::FromRows({{0, 0.2}, {-0.2, 0}})));
  EXPECT_EQ(p.probs, (std::vector<double>{1.0, 0.0}));
}

TEST(MaximalLotteryTest, SingleAlternative) {
  const Lottery p = MaximalLottery(Mm(Matrix(1, 1, 0.0)));
  EXPECT_EQ(p.probs, (std::vector<double>{1.0}));
  EXPECT_EQ(p.value, 0.0);
}

TEST(MaximalLotteryTest, RejectsInvalidMatrix) {
  MarginMatrix bad = Mm(EnMatrix());
  bad.margins(0, 1) = 0.5;  // breaks skew-symmetry
  EXPECT_THROW(MaximalLottery(bad), InputError);
}

TEST(MaximalLotteryTest, GuaranteeOnRandomMatrices) {
  Rng rng(20260101, "ml-guarantee");
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.UniformInt(7));
    const MarginMatrix mm = Mm(RandomSkew(m, rng));
    const Lottery p = MaximalLottery(mm);
    ASSERT_EQ(p.probs.size(), m);
    EXPECT_NEAR(Sum(p.probs), 1.0, 1e-9);
    for (double x : p.probs) EXPECT_GE(x, 0.0);
    const double g = PureGuarantee(p.probs, mm.margins);
    EXPECT_GE(g, -1e-7) << "trial " << trial;
    EXPECT_NEAR(g, 0.0, 1e-7) << "trial " << trial;
    EXPECT_NEAR(p.value, g, 1e-12);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> e(m, 0.0);
      e[j] = 1.0;
      EXPECT_GE(WinRate(p.probs, mm, e), 0.5 - 1e-7);
    }
  }
}

TEST(MaximalLotteryTest, StrictCondorcetWinnerIsTheWholeSupport) {
  Rng rng(7, "condorcet-consistency");
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.UniformInt(7));
    Matrix a = RandomSkew(m, rng);
    const std::size_t w = static_cast<std::size_t>(rng.UniformInt(m));
    for (std::size_t j = 0; j < m; ++j) {
      if (j == w) continue;
      const double v = std::min(1.0, std::abs(a(w, j)) + 0.01);
      a(w, j) = v;
      a(j, w) = -v;
    }
    const MarginMatrix mm = Mm(a);
    ASSERT_EQ(CondorcetWinner(mm, true), w);
    EXPECT_EQ(MaximalLottery(mm).Support(), (std::vector<std::size_t>{w}));
    EXPECT_EQ(BipartisanSet(mm), (std::vector<std::size_t>{w}));
  }
}

TEST(MaximalLotteryTest, RelabelingPermutesOutputExactly) {
  Rng rng(99, "neutrality");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.UniformInt(7));
    const MarginMatrix mm = Mm(RandomSkew(m, rng));
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(std::span(perm));
    // Relabeled matrix: new alternative a is old alternative perm[a].
    Matrix relabeled(m, m, 0.0);
    std::vector<std::string> roster(m);
    for (std::size_t a = 0; a < m; ++a) {
      roster[a] = mm.roster[perm[a]];
      for (std::size_t b = 0; b < m; ++b) relabeled(a, b) = mm.margins(perm[a], perm[b]);
    }
    const Lottery p = MaximalLottery(mm);
    const Lottery q = MaximalLottery(MakeMarginMatrix(roster, relabeled));
    for (std::size_t a = 0; a < m; ++a) {
      EXPECT_EQ(q.probs[a], p.probs[perm[a]]) << "trial " << trial;
    }
    EXPECT_EQ(q.value, p.value);
  }
}

TEST(MaximalLotteryTest, RepeatedSolvesAreBitwiseEqual) {
  Rng rng(5, "repeat");
  const MarginMatrix mm = Mm(RandomSkew(8, rng));
  const Lottery a = MaximalLottery(mm);
  const Lottery b = MaximalLottery(mm);
  EXPECT_EQ(a.probs, b.probs);
  EXPECT_EQ(a.value, b.value);
}

TEST(CondorcetWinnerTest, Examples) {
  EXPECT_EQ(CondorcetWinner(Mm(EnMatrix()), true), 0u);
  EXPECT_EQ(CondorcetWinner(Mm(EnMatrix()), false), 0u);
  EXPECT_FALSE(CondorcetWinner(Mm(EsMatrix()), true).has_value());
  EXPECT_FALSE(CondorcetWinner(Mm(EsMatrix()), false).has_value());
  const MarginMatrix zero = Mm(Matrix(4, 4, 0.0));
  EXPECT_EQ(CondorcetWinner(zero, false), 0u);
  EXPECT_FALSE(CondorcetWinner(zero, true).has_value());
}

TEST(CondorcetWinnerTest, WeakWinnerWithOneTie) {
  // 2 ties 1 and beats 3; 1 loses to 3.
  const Matrix a = Matrix::FromRows({{0, 0, -0.2}, {0, 0, 0.3}, {0.2, -0.3, 0}});
  EXPECT_EQ(CondorcetWinner(Mm(a), false), 1u);
  EXPECT_FALSE(CondorcetWinner(Mm(a), true).has_value());
}

TEST(BipartisanSetTest, Examples) {
  EXPECT_EQ(BipartisanSet(Mm(EnMatrix())), (std::vector<std::size_t>{0}));
  EXPECT_EQ(BipartisanSet(Mm(EsMatrix())), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BipartisanSetTest, CycleOverDominatedModel) {
  const Matrix a = Matrix::FromRows({{0, 0.4, -0.4, 0.3},
                                     {-0.4, 0, 0.4, 0.2},
                                     {0.4, -0.4, 0, 0.1},
                                     {-0.3, -0.2, -0.1, 0}});
  // Uniform on the cycle is a maximal lottery: every column guarantee >= 0.
  EXPECT_GE(PureGuarantee(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3, 0}, a), 0.0);
  EXPECT_EQ(BipartisanSet(Mm(a)), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BipartisanSetTest, AllTiedGivesEveryone) {
  EXPECT_EQ(BipartisanSet(Mm(Matrix(3, 3, 0.0))), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BipartisanSetTest, ContainsSupportOfMaximalLottery) {
  Rng rng(11, "bipartisan");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.UniformInt(6));
    const MarginMatrix mm = Mm(RandomSkew(m, rng));
    const std::vector<std::size_t> bs = BipartisanSet(mm);
    for (std::size_t i : MaximalLottery(mm).Support()) {
      EXPECT_TRUE(std::binary_search(bs.begin(), bs.end(), i)) << "trial " << trial;
    }
  }
}

TEST(ExpandClonesTest, HandicappedCloneOfWinner) {
  const std::vector<double> h{0.1};
  const CloneExpansion ex = ExpandClones(Mm(EnMatrix()), 0, h);
  ASSERT_EQ(ex.matrix.size(), 4u);
  EXPECT_EQ(ex.matrix.roster[3], "1#clone1");
  EXPECT_NEAR(ex.matrix.margins(3, 0), -0.1, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(3, 1), 0.5, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(3, 2), 0.5, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(0, 3), 0.1, 1e-15);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(ex.matrix.margins(a, b), EnMatrix()(a, b));
  }
  EXPECT_EQ(ex.map.parent.at("1#clone1"), "1");
  EXPECT_EQ(ex.map.parent.at("2"), "2");
}

TEST(ExpandClonesTest, CloneVersusCloneUsesHandicapDifference) {
  const std::vector<double> h{0.1, 0.25};
  const CloneExpansion ex = ExpandClones(Mm(EsMatrix()), 1, h);
  EXPECT_NEAR(ex.matrix.margins(3, 4), 0.15, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(4, 3), -0.15, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(4, 1), -0.25, 1e-15);
  EXPECT_NEAR(ex.matrix.margins(4, 2), 0.6 - 0.25, 1e-15);
}

TEST(ExpandClonesTest, RejectsOutOfRangeEntries) {
  const std::vector<double> h{0.6};
  // Model 3 loses to model 1 by 0.6, so its clone would sit at -1.2.
  EXPECT_THROW(ExpandClones(Mm(EnMatrix()), 2, h), InputError);
  const std::vector<double> neg{-0.1};
  EXPECT_THROW(ExpandClones(Mm(EnMatrix()), 0, neg), InputError);
  const std::vector<double> ok{0.1};
  EXPECT_THROW(ExpandClones(Mm(EnMatrix()), 3, ok), InputError);
}

TEST(ExpandClonesTest, ExactClonesKeepMaximalLotteries) {
  Rng rng(3, "exact-clones");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.UniformInt(6));
    const MarginMatrix mm = Mm(RandomSkew(m, rng));
    const std::size_t parent = static_cast<std::size_t>(rng.UniformInt(m));
    const std::vector<double> h(1 + rng.UniformInt(3), 0.0);
    const CloneExpansion ex = ExpandClones(mm, parent, h);
    const Lottery expanded = MaximalLottery(ex.matrix);
    EXPECT_NEAR(PureGuarantee(expanded.probs, ex.matrix.margins), 0.0, 1e-7);
    const Lottery proj = ProjectLottery(expanded, ex.map);
    EXPECT_NEAR(Sum(proj.probs), 1.0, 1e-12);
    // Guarantee >= 0 on M is membership in ML(M).
    EXPECT_GE(PureGuarantee(proj.probs, mm.margins), -1e-7) << "trial " << trial;
    const std::vector<std::size_t> bs = BipartisanSet(mm);
    for (std::size_t i : proj.Support()) {
      EXPECT_TRUE(std::binary_search(bs.begin(), bs.end(), i)) << "trial " << trial;
    }
  }
}

TEST(ProjectLotteryTest, CloneMassGoesToParent) {
  const CloneMap map = MakeCloneMap({"a", "b"}, 0, 1);
  Lottery p{map.expanded_roster, {0.3, 0.5, 0.2}, 0.0};
  const Lottery q = ProjectLottery(p, map);
  EXPECT_EQ(q.roster, (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(q.probs[0], 0.5);
  EXPECT_DOUBLE_EQ(q.probs[1], 0.5);
}

TEST(ProjectLotteryTest, NoClonesIsIdentity) {
  const CloneMap map = MakeCloneMap({"a", "b", "c"}, 1, 0);
  Lottery p{{"a", "b", "c"}, {0.2, 0.3, 0.5}, -0.1};
  const Lottery q = ProjectLottery(p, map);
  EXPECT_EQ(q.probs, p.probs);
  EXPECT_EQ(q.value, p.value);
}

TEST(ProjectLotteryTest, AllMassOnClones) {
  const CloneMap map = MakeCloneMap({"a", "b"}, 1, 2);
  Lottery p{map.expanded_roster, {0.0, 0.0, 0.25, 0.75}, 0.0};
  EXPECT_EQ(ProjectLottery(p, map).probs, (std::vector<double>{0.0, 1.0}));
}

TEST(ProjectLotteryTest, RosterMismatchThrows) {
  const CloneMap map = MakeCloneMap({"a", "b"}, 0, 1);
  Lottery p{{"a", "b"}, {0.5, 0.5}, 0.0};
  EXPECT_THROW(ProjectLottery(p, map), InputError);
}

TEST(CleanProbabilitiesTest, DropsDustAndRenormalizes) {
  const std::vector<double> raw{1.0 - 1e-16, 1e-16, 0.0};
  EXPECT_EQ(CleanProbabilities(raw), (std::vector<double>{1.0, 0.0, 0.0}));
  const std::vector<double> none{0.0, 1e-13};
  EXPECT_THROW(CleanProbabilities(none), SolverError);
}

}  // namespace
}  // namespace mlot
