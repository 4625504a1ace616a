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

#include "mlot/prefdata.h"

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mlot/rng.h"
#include "oracles.h"

namespace mlot {
namespace {

VoteTable ParseCsvText(const std::string& text) {
  std::istringstream in(text);
  return ParseVotes(in, VoteFormat::kCsv);
}

VoteRecord Vote(const std::string& a, const std::string& b, Outcome o,
                const std::string& g, double w = 1.0) {
  return VoteRecord{a, b, o, g, w};
}

// `wins_ab` votes for a over b and `wins_ba` the other way, one group.
VoteTable PairTable(int wins_ab, int wins_ba) {
  std::vector<VoteRecord> recs;
  for (int i = 0; i < wins_ab; ++i) recs.push_back(Vote("m1", "m2", Outcome::kAWins, "en"));
  for (int i = 0; i < wins_ba; ++i) recs.push_back(Vote("m1", "m2", Outcome::kBWins, "en"));
  return VoteTable(recs, {"m1", "m2"}, {"en"});
}

TEST(ParseVotesTest, HeaderlessCsvRowMapsFields) {
  const VoteTable t = ParseCsvText("m1,m2,a,en\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.records()[0], Vote("m1", "m2", Outcome::kAWins, "en"));
  EXPECT_EQ(t.roster(), (std::vector<std::string>{"m1", "m2"}));
  EXPECT_EQ(t.groups(), (std::vector<std::string>{"en"}));
}

TEST(ParseVotesTest, EmptyInputGivesEmptyTable) {
  const VoteTable t = ParseCsvText("");
  EXPECT_TRUE(t.empty());
  EXPECT_TRUE(t.roster().empty());
  EXPECT_TRUE(t.groups().empty());
}

TEST(ParseVotesTest, SelfComparisonNamesLine) {
  try {
    ParseCsvText("m1,m1,a,en\n");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("self-comparison at line 1"), std::string::npos)
        << e.what();
  }
}

TEST(ParseVotesTest, HeaderSelectsColumnsAndWeights) {
  const VoteTable t = ParseCsvText(
      "group,winner,model_b,model_a,weight\n"
      "pl,b,zeta,alpha,2.5\n"
      "en,tie,alpha,zeta,1\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.records()[0], Vote("alpha", "zeta", Outcome::kBWins, "pl", 2.5));
  EXPECT_EQ(t.records()[1].outcome, Outcome::kTie);
  EXPECT_EQ(t.roster(), (std::vector<std::string>{"alpha", "zeta"}));
  EXPECT_EQ(t.groups(), (std::vector<std::string>{"en", "pl"}));
}

TEST(ParseVotesTest, RejectsUnknownWinnerAndShortRows) {
  EXPECT_THROW(ParseCsvText("m1,m2,c,en\n"), InputError);
  try {
    ParseCsvText("m1,m2,a,en\nm1,m2\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ParseVotesTest, JsonlMatchesCsv) {
  std::istringstream in(
      "{\"model_a\":\"m1\",\"model_b\":\"m2\",\"winner\":\"a\",\"group\":\"en\"}\n"
      "{\"model_a\":\"m2\",\"model_b\":\"m3\",\"winner\":\"tie\",\"group\":\"es\",\"weight\":3}\n");
  const VoteTable j = ParseVotes(in, VoteFormat::kJsonl);
  const VoteTable c = ParseCsvText("m1,m2,a,en\nm2,m3,tie,es,3\n");
  EXPECT_EQ(j.records(), c.records());
  std::istringstream bad("{\"model_a\":\"m1\"}\n");
  EXPECT_THROW(ParseVotes(bad, VoteFormat::kJsonl), InputError);
}

TEST(FilterGroupsTest, DropsOtherGroupsAndCounts) {
  const VoteTable t = ParseCsvText("m1,m2,a,en\nm1,m2,b,de\nm1,m2,a,pl\nm2,m1,a,fr\n");
  std::size_t dropped = 0;
  const std::vector<std::string> keep{"en", "pl"};
  const VoteTable f = FilterGroups(t, keep, &dropped);
  EXPECT_EQ(dropped, 2u);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.groups(), keep);
}

TEST(BuildMarginsTest, UnsmoothedThreeToOne) {
  const GroupMargins gm = BuildMargins(PairTable(3, 1), 0.0);
  EXPECT_DOUBLE_EQ(gm.per_group[0].margins(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(gm.per_group[0].margins(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(gm.per_group[0].counts(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(gm.votes_per_group[0], 4.0);
}

TEST(BuildMarginsTest, SmoothingWithoutVotesGivesZero) {
  const GroupMargins gm = BuildMargins(PairTable(0, 0), 1.0);
  EXPECT_EQ(gm.per_group[0].margins(0, 1), 0.0);
}

TEST(BuildMarginsTest, SmoothedFourToZero) {
  const GroupMargins gm = BuildMargins(PairTable(4, 0), 1.0);
  EXPECT_NEAR(gm.per_group[0].margins(0, 1), 2.0 / 3.0, 1e-15);
}

TEST(BuildMarginsTest, UnobservedPairWithoutSmoothingIsZero) {
  const VoteTable t(std::vector<VoteRecord>{Vote("a", "b", Outcome::kAWins, "g")},
                    {"a", "b", "c"}, {"g"});
  const GroupMargins gm = BuildMargins(t, 0.0);
  EXPECT_EQ(gm.per_group[0].margins(0, 2), 0.0);
  EXPECT_EQ(gm.per_group[0].margins(0, 1), 1.0);
}

TEST(BuildMarginsTest, TiePolicies) {
  const VoteTable t = ParseCsvText("m1,m2,a,en\nm1,m2,tie,en\n");
  EXPECT_DOUBLE_EQ(BuildMargins(t, 0.0, TiePolicy::kDrop).per_group[0].margins(0, 1), 1.0);
  // Half wins: 1.5 vs 0.5.
  EXPECT_DOUBLE_EQ(BuildMargins(t, 0.0, TiePolicy::kHalfWin).per_group[0].margins(0, 1), 0.5);
  EXPECT_EQ(ParseTiePolicy(TiePolicyName(TiePolicy::kHalfWin)), TiePolicy::kHalfWin);
  EXPECT_THROW(ParseTiePolicy("coin"), InputError);
}

TEST(BuildMarginsTest, RejectsNegativeSmoothing) {
  EXPECT_THROW(BuildMargins(PairTable(1, 1), -0.5), InputError);
}

// Random vote table over m models and K groups.
VoteTable RandomVotes(Rng& rng, std::size_t m, std::size_t k, int n) {
  const auto roster = testing::Roster(m);
  const auto groups = testing::GroupIds(k);
  std::vector<VoteRecord> recs;
  for (int v = 0; v < n; ++v) {
    const auto a = rng.UniformInt(m);
    auto b = rng.UniformInt(m - 1);
    if (b >= a) ++b;
    const auto o = rng.UniformInt(3);
    recs.push_back(Vote(roster[a], roster[b],
                        o == 0 ? Outcome::kAWins : o == 1 ? Outcome::kBWins : Outcome::kTie,
                        groups[rng.UniformInt(k)], 0.5 + rng.UniformInt(3)));
  }
  return VoteTable(recs, roster, groups);
}

TEST(BuildMarginsTest, PropertySkewBoundedAndCountsSymmetric) {
  Rng rng(1, "prefdata-props");
  for (int trial = 0; trial < 100; ++trial) {
    const VoteTable t = RandomVotes(rng, 2 + rng.UniformInt(6), 1 + rng.UniformInt(4), 200);
    for (double eta : {0.0, 1.0}) {
      for (TiePolicy tie : {TiePolicy::kDrop, TiePolicy::kHalfWin}) {
        const GroupMargins gm = BuildMargins(t, eta, tie);
        double total = 0.0;
        for (std::size_t k = 0; k < gm.num_groups(); ++k) {
          const auto& mm = gm.per_group[k];
          for (std::size_t i = 0; i < mm.size(); ++i) {
            EXPECT_EQ(mm.margins(i, i), 0.0);
            for (std::size_t j = 0; j < mm.size(); ++j) {
              EXPECT_EQ(mm.margins(i, j), -mm.margins(j, i));
              EXPECT_LE(std::abs(mm.margins(i, j)), 1.0);
              EXPECT_EQ(mm.counts(i, j), mm.counts(j, i));
            }
          }
          total += gm.votes_per_group[k];
        }
        double weight = 0.0;
        for (const auto& r : t.records()) weight += r.weight;
        EXPECT_DOUBLE_EQ(total, weight);
      }
    }
  }
}

TEST(BuildMarginsTest, UnsmoothedEqualsDirectFormulaWhenAllPairsObserved) {
  Rng rng(2, "prefdata-direct");
  const VoteTable t = RandomVotes(rng, 4, 2, 3000);
  const GroupMargins gm = BuildMargins(t, 0.0, TiePolicy::kDrop);
  // Independent tally of strict wins.
  std::vector<Matrix> wins(2, Matrix(4, 4, 0.0));
  for (const auto& r : t.records()) {
    const auto a = t.ModelIndex(r.model_a), b = t.ModelIndex(r.model_b);
    auto& w = wins[t.GroupIndex(r.group)];
    if (r.outcome == Outcome::kAWins) w(a, b) += r.weight;
    if (r.outcome == Outcome::kBWins) w(b, a) += r.weight;
  }
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        const double n = wins[k](i, j) + wins[k](j, i);
        ASSERT_GT(n, 0.0);
        EXPECT_EQ(gm.per_group[k].margins(i, j), (wins[k](i, j) - wins[k](j, i)) / n);
      }
    }
  }
}

GroupMargins TwoGroupPair(double m1, double m2) {
  return MakeGroupMargins({"x", "y"}, {"g1", "g2"},
                          {Matrix::FromRows({{0, m1}, {-m1, 0}}),
                           Matrix::FromRows({{0, m2}, {-m2, 0}})});
}

TEST(PooledMatrixTest, IdentityAndCancellation) {
  const GroupMargins one = MakeGroupMargins({"x", "y"}, {"g"},
                                            {Matrix::FromRows({{0, 0.3}, {-0.3, 0}})});
  EXPECT_EQ(PooledMatrix(one, MixtureWeights({1.0})).margins, one.per_group[0].margins);
  const GroupMargins two = TwoGroupPair(0.6, -0.6);
  EXPECT_EQ(PooledMatrix(two, MixtureWeights({0.5, 0.5})).margins(0, 1), 0.0);
  EXPECT_THROW(PooledMatrix(two, MixtureWeights({1.0})), InputError);
}

TEST(PooledMatrixTest, WorkedExampleEntryCancels) {
  const Matrix en = Matrix::FromRows({{0, .6, .6}, {-.6, 0, .6}, {-.6, -.6, 0}});
  const Matrix es = Matrix::FromRows({{0, .6, -.6}, {-.6, 0, .6}, {.6, -.6, 0}});
  const GroupMargins gm = MakeGroupMargins({"1", "2", "3"}, {"EN", "ES"}, {en, es});
  const MarginMatrix pooled = PooledMatrix(gm, MixtureWeights({0.5, 0.5}));
  EXPECT_NEAR(pooled.margins(0, 2), 0.0, 1e-15);
  EXPECT_NEAR(pooled.margins(0, 1), 0.6, 1e-15);
}

TEST(PooledMatrixTest, PropertyLinearInWeights) {
  Rng rng(3, "pooled-linear");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.UniformInt(4);
    const GroupMargins gm = testing::RandomGroupMargins(2 + rng.UniformInt(6), k, rng);
    const auto w1 = testing::RandomWeights(k, rng, 0.0);
    const auto w2 = testing::RandomWeights(k, rng, 0.0);
    const double lam = rng.Uniform01();
    std::vector<double> mix(k);
    for (std::size_t g = 0; g < k; ++g) mix[g] = lam * w1[g] + (1 - lam) * w2[g];
    const auto a = PooledMatrix(gm, MixtureWeights::Normalized(mix)).margins;
    const auto b1 = PooledMatrix(gm, MixtureWeights::Normalized(w1)).margins;
    const auto b2 = PooledMatrix(gm, MixtureWeights::Normalized(w2)).margins;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < a.cols(); ++j) {
        EXPECT_NEAR(a(i, j), lam * b1(i, j) + (1 - lam) * b2(i, j), 1e-12);
      }
    }
  }
}

TEST(MixtureWeightsTest, Validation) {
  EXPECT_THROW(MixtureWeights({0.5, 0.6}), InputError);
  EXPECT_THROW(MixtureWeights({-0.1, 1.1}), InputError);
  EXPECT_NO_THROW(MixtureWeights({0.25, 0.75}));
  EXPECT_THROW(MixtureWeights::Normalized({0.0, 0.0}), InputError);
}

TEST(EmpiricalWeightsTest, Shares) {
  const VoteTable t = ParseCsvText("m1,m2,a,x\nm1,m2,a,x\nm1,m2,a,x\nm1,m2,b,y\n");
  const auto w = EmpiricalWeights(t).weights();
  EXPECT_DOUBLE_EQ(w[0], 0.75);
  EXPECT_DOUBLE_EQ(w[1], 0.25);
  EXPECT_DOUBLE_EQ(EmpiricalWeights(ParseCsvText("m1,m2,a,x\n"))[0], 1.0);
  const VoteTable weighted = ParseCsvText("m1,m2,a,x,2\nm1,m2,a,x,2\nm1,m2,a,y,1\n");
  EXPECT_NEAR(EmpiricalWeights(weighted)[0], 0.8, 1e-15);
  EXPECT_NEAR(EmpiricalWeights(weighted)[1], 0.2, 1e-15);
  EXPECT_THROW(EmpiricalWeights(VoteTable()), InputError);
}

TEST(WinRateTest, Examples) {
  const MarginMatrix m = MakeMarginMatrix({"a", "b"}, Matrix::FromRows({{0, .6}, {-.6, 0}}));
  const std::vector<double> e0{1, 0}, e1{0, 1}, mid{0.3, 0.7};
  EXPECT_DOUBLE_EQ(WinRate(e0, m, e1), 0.8);
  EXPECT_DOUBLE_EQ(WinRate(mid, m, mid), 0.5);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(WinRate(bad, m, e1), InputError);
}

TEST(WinRateTest, PropertyComplementary) {
  Rng rng(4, "winrate");
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.UniformInt(7);
    const MarginMatrix m = MakeMarginMatrix(testing::Roster(n), testing::RandomSkew(n, rng));
    const auto p = testing::RandomWeights(n, rng, 0.0);
    const auto q = testing::RandomWeights(n, rng, 0.0);
    const double pq = WinRate(p, m, q), qp = WinRate(q, m, p);
    EXPECT_NEAR(pq + qp, 1.0, 1e-12);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
  }
}

GroupMargins SignGroups(std::vector<double> signs) {
  std::vector<Matrix> mats;
  std::vector<std::string> ids;
  for (std::size_t k = 0; k < signs.size(); ++k) {
    mats.push_back(Matrix::FromRows({{0, signs[k]}, {-signs[k], 0}}));
    ids.push_back("g" + std::to_string(k));
  }
  return MakeGroupMargins({"x", "y"}, ids, mats);
}

TEST(ReversalRateTest, Examples) {
  EXPECT_DOUBLE_EQ(ReversalRate(SignGroups({.3, -.3}), MixtureWeights::Uniform(2), 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(ReversalRate(SignGroups({.3, .2}), MixtureWeights::Uniform(2), 0, 1), 0.0);
  EXPECT_NEAR(ReversalRate(SignGroups({.3, .2, -.1}), MixtureWeights::Uniform(3), 0, 1),
              2.0 / 3.0, 1e-15);
  // Zero disagrees with both signs, and two zeros agree.
  EXPECT_DOUBLE_EQ(ReversalRate(SignGroups({0.0, .2}), MixtureWeights::Uniform(2), 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(ReversalRate(SignGroups({0.0, 0.0}), MixtureWeights::Uniform(2), 0, 1), 0.0);
}

TEST(ReversalRateTest, SingleGroupIsAnError) {
  try {
    ReversalRate(SignGroups({.3}), MixtureWeights::Uniform(1), 0, 1);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_STREQ(e.what(), "reversal undefined for one group");
  }
}

TEST(ReversalRateTest, PropertySymmetricAndBounded) {
  Rng rng(5, "reversal");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.UniformInt(4), m = 2 + rng.UniformInt(5);
    const GroupMargins gm = testing::RandomGroupMargins(m, k, rng);
    const auto w = MixtureWeights::Normalized(testing::RandomWeights(k, rng));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        const double r = ReversalRate(gm, w, i, j);
        EXPECT_EQ(r, ReversalRate(gm, w, j, i));
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
      }
    }
  }
}

VoteTable Numbered(int n) {
  std::vector<VoteRecord> recs;
  for (int i = 0; i < n; ++i) {
    recs.push_back(Vote("m1", "m2", Outcome::kAWins, "g", static_cast<double>(i + 1)));
  }
  return VoteTable(recs, {"m1", "m2"}, {"g"});
}

TEST(SplitTest, SizesAndDeterminism) {
  const auto [train, test] = Split(Numbered(10), 0.8, 7);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(test.size(), 2u);
  const auto [train2, test2] = Split(Numbered(10), 0.8, 7);
  EXPECT_EQ(train.records(), train2.records());
  EXPECT_EQ(test.records(), test2.records());
  // Partition: every record lands exactly once.
  std::multiset<double> ids;
  for (const auto& r : train.records()) ids.insert(r.weight);
  for (const auto& r : test.records()) ids.insert(r.weight);
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_EQ(std::set<double>(ids.begin(), ids.end()).size(), 10u);
}

TEST(SplitTest, SeedsDifferAndRosterKept) {
  const VoteTable big = Numbered(1000);
  EXPECT_NE(Split(big, 0.8, 7).first.records(), Split(big, 0.8, 8).first.records());
  const VoteTable t(std::vector<VoteRecord>{Vote("a", "b", Outcome::kAWins, "g1"),
                                            Vote("a", "c", Outcome::kAWins, "g2")},
                    {"a", "b", "c"}, {"g1", "g2"});
  const auto [tr, te] = Split(t, 0.5, 1);
  EXPECT_EQ(tr.roster(), t.roster());
  EXPECT_EQ(te.groups(), t.groups());
  EXPECT_THROW(Split(t, 1.0, 1), InputError);
  EXPECT_THROW(Split(t, 0.0, 1), InputError);
}

TEST(BootstrapTest, SingleRecordAndDeterminism) {
  const VoteTable one = Numbered(1);
  EXPECT_EQ(BootstrapResample(one, 3).records(), one.records());
  const VoteTable t = Numbered(50);
  EXPECT_EQ(BootstrapResample(t, 3, 4).records(), BootstrapResample(t, 3, 4).records());
  EXPECT_NE(BootstrapResample(t, 3, 4).records(), BootstrapResample(t, 3, 5).records());
  EXPECT_THROW(BootstrapResample(VoteTable(), 3), InputError);
}

TEST(BootstrapTest, MeanGroupSharesMatchEmpirical) {
  std::vector<VoteRecord> recs;
  for (int i = 0; i < 70; ++i) recs.push_back(Vote("a", "b", Outcome::kAWins, "x"));
  for (int i = 0; i < 30; ++i) recs.push_back(Vote("a", "b", Outcome::kBWins, "y"));
  const VoteTable t(recs);
  const int reps = 10000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double share = EmpiricalWeights(BootstrapResample(t, 9, r))[0];
    sum += share;
    sumsq += share * share;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sumsq / reps - mean * mean);
  EXPECT_LE(std::abs(mean - 0.7), 3.0 * sd / std::sqrt(reps));
}

TEST(BootstrapTest, StratifiedKeepsGroupSizes) {
  std::vector<VoteRecord> recs;
  for (int i = 0; i < 7; ++i) recs.push_back(Vote("a", "b", Outcome::kAWins, "x"));
  for (int i = 0; i < 3; ++i) recs.push_back(Vote("a", "b", Outcome::kBWins, "y"));
  const VoteTable t(recs);
  for (int r = 0; r < 20; ++r) {
    const auto w = EmpiricalWeights(StratifiedBootstrapResample(t, 1, r));
    EXPECT_DOUBLE_EQ(w[0], 0.7);
  }
}

}  // namespace
}  // namespace mlot
