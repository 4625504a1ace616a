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

#include "mlot/io.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.h"

namespace mlot {
namespace {

namespace fs = std::filesystem;

std::size_t CountLines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::string FirstLine(const std::string& s) { return s.substr(0, s.find('\n')); }

VoteTable SmallSynth() {
  SynthConfig c;
  c.m = 4;
  c.k = 2;
  c.votes_per_group = 60;
  c.noise = 0.3;
  c.seed = 9;
  return SynthGenerate(c);
}

TEST(MarginsJsonTest, RoundTripIsExact) {
  const GroupMargins gm = BuildMargins(SmallSynth(), 1.0, TiePolicy::kHalfWin);
  const Json doc = GroupMarginsToJson(gm);
  const GroupMargins back = GroupMarginsFromJson(Json::parse(doc.dump()));
  EXPECT_EQ(back.roster, gm.roster);
  EXPECT_EQ(back.groups, gm.groups);
  EXPECT_EQ(back.eta, gm.eta);
  EXPECT_EQ(back.tie_policy, gm.tie_policy);
  EXPECT_EQ(back.votes_per_group, gm.votes_per_group);
  for (std::size_t k = 0; k < gm.num_groups(); ++k) {
    EXPECT_EQ(back.per_group[k].margins, gm.per_group[k].margins);
    EXPECT_EQ(back.per_group[k].counts, gm.per_group[k].counts);
  }
}

TEST(MarginsJsonTest, KeysAndGroupKeyedObjects) {
  const GroupMargins gm = testing::EnEsMargins();
  const Json doc = GroupMarginsToJson(gm);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"roster", "groups", "eta", "tie_policy",
                                            "votes_per_group", "matrices", "counts"}));
  EXPECT_EQ(doc["tie_policy"], "drop");
  EXPECT_EQ(doc["matrices"]["EN"][0][1], 0.6);
  EXPECT_EQ(doc["matrices"]["ES"][2][0], 0.6);
  EXPECT_EQ(doc["votes_per_group"]["EN"], 0.0);
}

TEST(MarginsJsonTest, CountsAreOptionalOnInput) {
  Json doc = GroupMarginsToJson(testing::EnEsMargins());
  doc.erase("counts");
  const GroupMargins gm = GroupMarginsFromJson(doc);
  EXPECT_EQ(gm.per_group[1].margins, testing::EsMatrix());
  EXPECT_EQ(gm.per_group[1].counts, Matrix(3, 3, 0.0));
}

TEST(MarginsJsonTest, RejectsMalformedDocuments) {
  const Json good = GroupMarginsToJson(testing::EnEsMargins());
  Json missing = good;
  missing.erase("roster");
  EXPECT_THROW(GroupMarginsFromJson(missing), InputError);
  Json not_skew = good;
  not_skew["matrices"]["EN"][0][1] = 0.5;
  EXPECT_THROW(GroupMarginsFromJson(not_skew), InputError);
  Json out_of_range = good;
  out_of_range["matrices"]["EN"][0][1] = 1.5;
  out_of_range["matrices"]["EN"][1][0] = -1.5;
  EXPECT_THROW(GroupMarginsFromJson(out_of_range), InputError);
  Json short_row = good;
  short_row["matrices"]["EN"][0] = Json::array({0, 0.6});
  EXPECT_THROW(GroupMarginsFromJson(short_row), InputError);
  Json missing_group = good;
  missing_group["matrices"].erase("ES");
  EXPECT_THROW(GroupMarginsFromJson(missing_group), InputError);
  Json extra_group = good;
  extra_group["votes_per_group"]["FR"] = 3;
  EXPECT_THROW(GroupMarginsFromJson(extra_group), InputError);
  Json bad_votes = good;
  bad_votes["votes_per_group"]["EN"] = -1;
  EXPECT_THROW(GroupMarginsFromJson(bad_votes), InputError);
  Json bad_tie = good;
  bad_tie["tie_policy"] = "coin";
  EXPECT_THROW(GroupMarginsFromJson(bad_tie), InputError);
  EXPECT_THROW(GroupMarginsFromJson(Json::array()), InputError);
}

TEST(LotteryJsonTest, SupportListsIds) {
  const Lottery lot{{"a", "b", "c"}, {0.25, 0.0, 0.75}, -0.125};
  const Json doc = LotteryToJson(lot);
  EXPECT_EQ(doc.dump(), R"({"roster":["a","b","c"],"probs":[0.25,0.0,0.75],"value":-0.125,"support":["a","c"]})");
}

TEST(LotteryJsonTest, NumbersRoundTripExactly) {
  const Lottery lot{{"a", "b", "c"}, {1.0 / 3, 1.0 / 7, 1 - 1.0 / 3 - 1.0 / 7}, -1e-17};
  const Json back = Json::parse(LotteryToJson(lot).dump());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back["probs"][i].get<double>(), lot.probs[i]);
  EXPECT_EQ(back["value"].get<double>(), lot.value);
}

TEST(RobustReportJsonTest, Schema) {
  const AmbiguitySet amb =
      AmbiguitySet::MakeTvBall(testing::EnEsMargins(), MixtureWeights({0.5, 0.5}), 0.2);
  const RobustSolveReport rep = RobustLottery(amb);
  const Json doc = RobustReportToJson(rep, {"EN", "ES"});
  for (const char* key : {"rho", "w0", "lottery", "robust_value", "duals", "active", "worst_case"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc["rho"], 0.2);
  EXPECT_EQ(doc["w0"], Json::array({0.5, 0.5}));
  EXPECT_EQ(doc["duals"]["mu"].size(), 3u);
  EXPECT_EQ(doc["duals"]["lambda"].size(), 3u);
  EXPECT_EQ(doc["duals"]["gamma"].size(), 3u);
  EXPECT_EQ(doc["duals"]["gamma"][0].size(), 2u);
  EXPECT_EQ(doc["robust_value"].get<double>(), rep.robust_value);
  EXPECT_EQ(doc["active"].size(), rep.active_alternatives.size());
  EXPECT_TRUE(doc["worst_case"]["opponent"].is_string());
}

std::vector<SweepPoint> SmallSweep() {
  const VoteTable votes = SmallSynth();
  SweepOptions opts;
  opts.grid = {0.0, 0.5, 1.0};
  opts.bootstrap_n = 3;
  opts.seed = 1;
  return SweepRho(votes, votes, opts);
}

TEST(SweepCsvTest, OneRowPerRadiusSplitAndKind) {
  const auto pts = SmallSweep();
  const std::vector<std::string> groups{"group_00", "group_01"};
  const std::string csv = SweepToCsv(pts, groups);
  EXPECT_EQ(FirstLine(csv), "rho,split,kind,group,mean,std_error");
  // 3 radii x 2 splits x (overall + worst_group + 2 groups)
  EXPECT_EQ(CountLines(csv), 1u + 3 * 2 * 4);
  EXPECT_NE(csv.find("\n0.5,test,group,group_01,"), std::string::npos);
  EXPECT_NE(csv.find("\n1,train,worst_group,,"), std::string::npos);
  const Json doc = SweepToJson(pts, groups);
  EXPECT_EQ(doc["points"].size(), 6u);
}

TEST(FrontierCsvTest, InfeasibleRowsUseNanAndNull) {
  const GroupMargins gm = MakeGroupMargins(
      {"cheap", "pricey"}, {"g"}, {Matrix::FromRows({{0, -0.5}, {0.5, 0}})});
  const std::vector<double> costs{1.0, 10.0};
  const std::vector<double> budgets{0.5, 1.0, 20.0};
  const auto pts = CostFrontier(gm, costs, budgets, 0.0, MixtureWeights::Uniform(1));
  const std::string csv = FrontierToCsv(pts);
  EXPECT_EQ(FirstLine(csv), "budget,feasible,worst_case_win_rate,expected_cost,support");
  EXPECT_EQ(CountLines(csv), 4u);
  EXPECT_NE(csv.find("\n0.5,false,nan,nan,"), std::string::npos);
  EXPECT_NE(csv.find("\n1,true,0.25,1,cheap:1\n"), std::string::npos);
  const Json doc = Json::parse(FrontierToJson(pts).dump());
  EXPECT_TRUE(doc["points"][0]["worst_case_win_rate"].is_null());
  EXPECT_EQ(doc["points"][1]["worst_case_win_rate"], 0.25);
}

TEST(RegretCsvTest, HeaderAndSummary) {
  const GroupMargins gm = testing::EnEsMargins();
  const auto samples = RegretSimulation(gm, MixtureWeights({0.3, 0.7}), 100, 0.1, 4, 2);
  const std::string csv = RegretToCsv(samples);
  EXPECT_EQ(FirstLine(csv), "trial,rho_used,regret,tv_distance,covered,bound");
  EXPECT_EQ(CountLines(csv), 5u);
  const Json doc = RegretToJson(samples, 100, 0.1);
  EXPECT_EQ(doc["samples"].size(), 4u);
  EXPECT_EQ(doc["trials"], 4);
  EXPECT_TRUE(doc.contains("coverage"));
  EXPECT_TRUE(doc.contains("within_bound"));
}

TEST(VotesCsvTest, RoundTripThroughParser) {
  const VoteTable votes = SmallSynth();
  std::istringstream in(VotesToCsv(votes));
  const VoteTable back = ParseVotes(in, VoteFormat::kCsv);
  EXPECT_EQ(back.records(), votes.records());
  EXPECT_EQ(back.groups(), votes.groups());
}

TEST(ParseCostsTest, HeaderOptionalAndOrderedByRoster) {
  const std::vector<std::string> roster{"a", "b"};
  std::istringstream with_header("model,cost\nb,2.5\na,0.5\n");
  EXPECT_EQ(ParseCosts(with_header, roster), (std::vector<double>{0.5, 2.5}));
  std::istringstream bare("a,1\n\nb,3\n");
  EXPECT_EQ(ParseCosts(bare, roster), (std::vector<double>{1, 3}));
}

TEST(ParseCostsTest, Errors) {
  const std::vector<std::string> roster{"a", "b"};
  std::istringstream dup("a,1\na,2\nb,1\n");
  EXPECT_THROW(ParseCosts(dup, roster), InputError);
  std::istringstream missing("a,1\n");
  EXPECT_THROW(ParseCosts(missing, roster), InputError);
  std::istringstream negative("a,-1\nb,1\n");
  EXPECT_THROW(ParseCosts(negative, roster), InputError);
  std::istringstream junk("a,cheap\nb,1\n");
  EXPECT_THROW(ParseCosts(junk, roster), InputError);
}

TEST(FilesTest, AtomicWriteLeavesNoTemporary) {
  const fs::path dir = fs::temp_directory_path() / "mlot_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  WriteFileAtomic(path, "first");
  WriteFileAtomic(path, "second");
  EXPECT_EQ(ReadFile(path), "second");
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  fs::remove_all(dir);
  EXPECT_THROW(ReadFile(path), InputError);
}

TEST(FilesTest, FormatAndNumberLists) {
  EXPECT_EQ(FormatFromPath("x/votes.csv"), VoteFormat::kCsv);
  EXPECT_EQ(FormatFromPath("votes.jsonl"), VoteFormat::kJsonl);
  EXPECT_EQ(FormatFromPath("votes.ndjson"), VoteFormat::kJsonl);
  EXPECT_THROW(FormatFromPath("votes.txt"), InputError);
  EXPECT_EQ(ParseDoubleList("0,0.1, 1"), (std::vector<double>{0, 0.1, 1}));
  EXPECT_THROW(ParseDoubleList("0,,1"), InputError);
  EXPECT_THROW(ParseDoubleList("a"), InputError);
  EXPECT_THROW(ParseDoubleList(""), InputError);
}

}  // namespace
}  // namespace mlot
