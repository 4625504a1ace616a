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

#include "mlot/cli.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "mlot/evalharness.h"
#include "mlot/io.h"
#include "mlot/lottery.h"
#include "mlot/prefdata.h"
#include "mlot/robust.h"

namespace mlot {
namespace {

// Flags shared by the commands that read raw votes.
struct IngestFlags {
  double eta = 1.0;
  std::string tie_policy = "drop";
  std::vector<std::string> groups;
  std::string group_field = "group";
  std::string format;  // empty: infer from extension
};

void AddIngestFlags(CLI::App* cmd, IngestFlags& f) {
  cmd->add_option("--eta", f.eta, "Laplace smoothing added to every ordered pair count")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tie-policy", f.tie_policy, "How ties count: drop | half_win")
      ->capture_default_str()
      ->check(CLI::IsMember({"drop", "half_win"}));
  cmd->add_option("--groups", f.groups, "Keep only these groups (comma-separated)")
      ->delimiter(',');
  cmd->add_option("--group-field", f.group_field, "Column or key holding the group label")
      ->capture_default_str();
  cmd->add_option("--format", f.format, "Vote file format: csv | jsonl (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

VoteTable LoadVotes(const std::string& path, const IngestFlags& f,
                    std::ostream& log) {
  const VoteFormat format = f.format.empty()   ? FormatFromPath(path)
                            : f.format == "csv" ? VoteFormat::kCsv
                                                : VoteFormat::kJsonl;
  std::istringstream in(ReadFile(path));
  VoteTable votes = ParseVotes(in, format, ParseOptions{f.group_field});
  if (!f.groups.empty()) {
    std::size_t dropped = 0;
    votes = FilterGroups(votes, f.groups, &dropped);
    log << "dropped " << dropped << " votes outside --groups\n";
  }
  if (votes.empty()) throw InputError("no votes left in '" + path + "'");
  return votes;
}

GroupMargins LoadMargins(const std::string& path) {
  const std::string text = ReadFile(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
  return GroupMarginsFromJson(doc);
}

// --weights if given, otherwise vote shares (uniform when no votes are
// recorded, as for planted matrices).
MixtureWeights ResolveWeights(const GroupMargins& gm,
                              const std::vector<double>& weights) {
  if (!weights.empty()) {
    if (weights.size() != gm.num_groups()) {
      throw InputError("--weights needs " + std::to_string(gm.num_groups()) +
                       " entries, got " + std::to_string(weights.size()));
    }
    return MixtureWeights::Normalized(weights);
  }
  double total = 0.0;
  for (double v : gm.votes_per_group) total += v;
  return total > 0.0 ? VoteShareWeights(gm) : MixtureWeights::Uniform(gm.num_groups());
}

std::size_t GroupIndexOf(const GroupMargins& gm, const std::string& id) {
  const auto it = std::find(gm.groups.begin(), gm.groups.end(), id);
  if (it == gm.groups.end()) throw InputError("unknown group '" + id + "'");
  return static_cast<std::size_t>(it - gm.groups.begin());
}

Json IdsJson(const std::vector<std::string>& roster,
             const std::vector<std::size_t>& idx) {
  Json out = Json::array();
  for (std::size_t i : idx) out.push_back(roster[i]);
  return out;
}

void Emit(const Json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    WriteFileAtomic(path, text);
  }
}

void EmitPair(const std::string& prefix, const std::string& csv,
              const Json& doc, std::ostream& out) {
  WriteFileAtomic(prefix + ".csv", csv);
  WriteFileAtomic(prefix + ".json", doc.dump(2) + "\n");
  out << "wrote " << prefix << ".csv and " << prefix << ".json\n";
}

std::vector<double> LoadCosts(const std::string& path,
                              const std::vector<std::string>& roster) {
  std::istringstream in(ReadFile(path));
  return ParseCosts(in, roster);
}

const char* kSweepColumns =
    "Writes PREFIX.csv with columns rho,split,kind,group,mean,std_error (kind is\n"
    "overall, worst_group or group) and PREFIX.json with the same points, the\n"
    "fitted lottery per radius and the train-minus-test generalization gap.";
const char* kFrontierColumns =
    "Writes PREFIX.csv with columns budget,feasible,worst_case_win_rate,\n"
    "expected_cost,support (support is id:prob pairs joined by ';') and\n"
    "PREFIX.json with the full lotteries.";
const char* kRegretColumns =
    "Writes PREFIX.csv with columns trial,rho_used,regret,tv_distance,covered,\n"
    "bound and PREFIX.json with the samples plus coverage and bound-satisfaction\n"
    "fractions.";
const char* kReportColumns =
    "Prints per-group and pooled maximal lotteries and the top reversal pairs.\n"
    "With -o, writes PREFIX.csv with columns model_a,model_b,reversal_rate and\n"
    "PREFIX.json with the whole report.";

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"mlot: maximal and distributionally robust lotteries from pairwise votes"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every command");
  app.footer(
      "Exit codes: 0 ok, 2 input error, 3 infeasible constraint, 4 solver failure.");

  std::function<void()> action;

  // ingest
  std::string ingest_in, ingest_out;
  IngestFlags ingest_flags;
  auto* ingest = app.add_subcommand("ingest", "Build per-group margin matrices from votes");
  ingest->add_option("votes", ingest_in, "Vote file (.csv or .jsonl)")->required();
  ingest->add_option("-o,--output", ingest_out, "Margins JSON path (default: stdout)");
  AddIngestFlags(ingest, ingest_flags);
  ingest->footer(
      "Vote CSV columns: model_a,model_b,winner,group[,weight]; winner is a, b or tie.\n"
      "Margins JSON keys: roster, groups, eta, tie_policy, votes_per_group,\n"
      "matrices, counts.");
  ingest->callback([&] {
    action = [&] {
      const VoteTable votes = LoadVotes(ingest_in, ingest_flags, err);
      const GroupMargins gm = BuildMargins(votes, ingest_flags.eta,
                                           ParseTiePolicy(ingest_flags.tie_policy));
      Emit(GroupMarginsToJson(gm), ingest_out, out);
      std::ostream& log = ingest_out.empty() ? err : out;
      log << "models: " << gm.num_models() << "\ngroups: " << gm.num_groups() << '\n';
      for (std::size_t k = 0; k < gm.num_groups(); ++k) {
        log << "  " << gm.groups[k] << ": " << FormatDouble(gm.votes_per_group[k])
            << " votes\n";
      }
    };
  });

  // ml
  std::string ml_in, ml_out, ml_group;
  std::vector<double> ml_weights;
  auto* ml = app.add_subcommand("ml", "Maximal lottery of one group or a pooled mixture");
  ml->add_option("margins", ml_in, "Margins JSON from ingest")->required();
  auto* ml_group_opt = ml->add_option("--group", ml_group, "Use this group's matrix");
  ml->add_option("--weights", ml_weights, "Pool groups with these weights (comma-separated)")
      ->delimiter(',')
      ->excludes(ml_group_opt);
  ml->add_option("-o,--output", ml_out, "Lottery JSON path (default: stdout)");
  ml->footer("Default pooling uses vote shares. Output keys: roster, probs, value,\n"
             "support, bipartisan_set, condorcet_winner, matrix.");
  ml->callback([&] {
    action = [&] {
      const GroupMargins gm = LoadMargins(ml_in);
      MarginMatrix m;
      std::string label;
      if (!ml_group.empty()) {
        m = gm.per_group[GroupIndexOf(gm, ml_group)];
        label = "group:" + ml_group;
      } else {
        m = PooledMatrix(gm, ResolveWeights(gm, ml_weights));
        label = "pooled";
      }
      const Lottery lot = MaximalLottery(m);
      Json doc = LotteryToJson(lot);
      doc["bipartisan_set"] = IdsJson(gm.roster, BipartisanSet(m));
      const auto cw = CondorcetWinner(m, /*strict=*/true);
      doc["condorcet_winner"] = cw ? Json(gm.roster[*cw]) : Json(nullptr);
      doc["matrix"] = label;
      Emit(doc, ml_out, out);
    };
  });

  // drl
  std::string drl_in, drl_out, drl_costs;
  double drl_rho = 0.0, drl_delta = 0.05, drl_budget = 0.0;
  bool drl_auto = false;
  std::vector<double> drl_weights;
  auto* drl = app.add_subcommand("drl", "Distributionally robust lottery over a TV ball");
  drl->add_option("margins", drl_in, "Margins JSON from ingest")->required();
  auto* rho_opt = drl->add_option("--rho", drl_rho, "TV radius in [0, 1]")
                      ->check(CLI::Range(0.0, 1.0));
  auto* auto_opt = drl->add_flag("--rho-auto", drl_auto,
                                 "Radius from vote count n and K: min(1, sqrt(K/n) + sqrt(2 ln(2/delta)/n))");
  rho_opt->excludes(auto_opt);
  drl->add_option("--delta", drl_delta, "Confidence level for --rho-auto")
      ->capture_default_str()
      ->check(CLI::Range(1e-12, 1.0));
  drl->add_option("--weights", drl_weights, "Ball center (default: vote shares)")
      ->delimiter(',');
  auto* budget_opt = drl->add_option("--budget", drl_budget, "Expected-cost budget");
  auto* costs_opt = drl->add_option("--costs", drl_costs, "CSV model,cost");
  budget_opt->needs(costs_opt);
  costs_opt->needs(budget_opt);
  drl->add_option("-o,--output", drl_out, "Report JSON path (default: stdout)");
  drl->footer("Exactly one of --rho and --rho-auto is required. Output keys: rho, w0,\n"
              "groups, lottery, robust_value, robust_win_rate, active,\n"
              "duals {mu, lambda, gamma}, worst_case, and budget/expected_cost when\n"
              "a budget is given.");
  drl->callback([&] {
    action = [&] {
      if (rho_opt->count() == 0 && !drl_auto) {
        throw InputError("drl: pass --rho or --rho-auto");
      }
      const GroupMargins gm = LoadMargins(drl_in);
      const MixtureWeights center = ResolveWeights(gm, drl_weights);
      double rho = drl_rho;
      if (drl_auto) {
        double n = 0.0;
        for (double v : gm.votes_per_group) n += v;
        if (!(n >= 1.0)) throw InputError("drl: --rho-auto needs recorded vote counts");
        rho = RhoFromData(static_cast<std::uint64_t>(std::llround(n)), gm.num_groups(),
                          drl_delta);
      }
      const AmbiguitySet amb = AmbiguitySet::MakeTvBall(gm, center, rho);
      std::vector<LotteryConstraint> extra;
      std::vector<double> costs;
      if (!drl_costs.empty()) {
        costs = LoadCosts(drl_costs, gm.roster);
        extra.push_back({costs, drl_budget});
      }
      const RobustSolveReport rep = RobustLottery(amb, extra);
      Json doc = RobustReportToJson(rep, gm.groups);
      if (!costs.empty()) {
        doc["budget"] = drl_budget;
        doc["expected_cost"] = Dot(rep.lottery.probs, costs);
      }
      Emit(doc, drl_out, out);
    };
  });

  // sweep
  std::string sweep_in, sweep_test, sweep_prefix;
  IngestFlags sweep_flags;
  SweepOptions sweep_opts;
  sweep_opts.grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::string sweep_grid, sweep_opponent = "worst";
  double sweep_fraction = 0.8;
  auto* sweep = app.add_subcommand("sweep", "Radius sweep with bootstrap error bars");
  sweep->add_option("votes", sweep_in, "Vote file; split into train/test unless --test is given")
      ->required();
  sweep->add_option("--test", sweep_test, "Held-out vote file");
  sweep->add_option("--train-fraction", sweep_fraction, "Training share of the split")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--grid", sweep_grid, "Radii (comma-separated; default 0,0.1,...,1)");
  sweep->add_option("--bootstrap", sweep_opts.bootstrap_n,
                    "Bootstrap replicates per split (0 scores the tables once)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--seed", sweep_opts.seed, "Seed for split and bootstrap streams")
      ->capture_default_str();
  sweep->add_option("--opponent", sweep_opponent, "Scoring opponent: worst | uniform")
      ->capture_default_str()
      ->check(CLI::IsMember({"worst", "uniform"}));
  sweep->add_flag("--stratified", sweep_opts.stratified, "Resample within each group");
  sweep->add_option("-o,--output", sweep_prefix, "Output prefix")->required();
  AddIngestFlags(sweep, sweep_flags);
  sweep->footer(kSweepColumns);
  sweep->callback([&] {
    action = [&] {
      VoteTable all = LoadVotes(sweep_in, sweep_flags, err);
      VoteTable train, test;
      if (!sweep_test.empty()) {
        train = std::move(all);
        const VoteTable raw_test = LoadVotes(sweep_test, sweep_flags, err);
        // Rosters are fixed by the training table.
        std::vector<VoteRecord> kept;
        for (const auto& r : raw_test.records()) kept.push_back(r);
        test = VoteTable(std::move(kept), train.roster(), train.groups());
      } else {
        std::tie(train, test) = Split(all, sweep_fraction, sweep_opts.seed);
      }
      if (!sweep_grid.empty()) sweep_opts.grid = ParseDoubleList(sweep_grid);
      sweep_opts.eta = sweep_flags.eta;
      sweep_opts.tie_policy = ParseTiePolicy(sweep_flags.tie_policy);
      sweep_opts.opponent = ParseOpponent(sweep_opponent);
      const auto points = SweepRho(train, test, sweep_opts);
      std::vector<SweepPoint> tr, te;
      for (const auto& p : points) (p.split == SplitKind::kTrain ? tr : te).push_back(p);
      Json doc = SweepToJson(points, train.groups());
      Json gaps = Json::array();
      for (const auto& g : GeneralizationGap(tr, te)) {
        gaps.push_back({{"rho", g.rho}, {"gap", g.gap}});
      }
      doc["generalization_gap"] = std::move(gaps);
      doc["options"] = {{"bootstrap", sweep_opts.bootstrap_n},
                        {"seed", sweep_opts.seed},
                        {"eta", sweep_opts.eta},
                        {"tie_policy", TiePolicyName(sweep_opts.tie_policy)},
                        {"opponent", OpponentName(sweep_opts.opponent)},
                        {"stratified", sweep_opts.stratified},
                        {"train_votes", train.size()},
                        {"test_votes", test.size()}};
      EmitPair(sweep_prefix, SweepToCsv(points, train.groups()), doc, out);
    };
  });

  // frontier
  std::string fr_in, fr_costs, fr_budgets, fr_prefix;
  double fr_rho = 0.0;
  std::vector<double> fr_weights;
  auto* frontier = app.add_subcommand("frontier", "Cost-constrained robust frontier");
  frontier->add_option("margins", fr_in, "Margins JSON from ingest")->required();
  frontier->add_option("--costs", fr_costs, "CSV model,cost")->required();
  frontier->add_option("--budgets", fr_budgets, "Budgets (comma-separated)")->required();
  frontier->add_option("--rho", fr_rho, "TV radius in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  frontier->add_option("--weights", fr_weights, "Ball center (default: vote shares)")
      ->delimiter(',');
  frontier->add_option("-o,--output", fr_prefix, "Output prefix")->required();
  frontier->footer(kFrontierColumns);
  frontier->callback([&] {
    action = [&] {
      const GroupMargins gm = LoadMargins(fr_in);
      const auto costs = LoadCosts(fr_costs, gm.roster);
      const auto budgets = ParseDoubleList(fr_budgets);
      const auto points =
          CostFrontier(gm, costs, budgets, fr_rho, ResolveWeights(gm, fr_weights));
      Json doc = FrontierToJson(points);
      doc["rho"] = fr_rho;
      EmitPair(fr_prefix, FrontierToCsv(points), doc, out);
    };
  });

  // regret-sim
  std::string rg_in, rg_prefix;
  std::vector<double> rg_weights;
  std::uint64_t rg_n = 2000, rg_seed = 0;
  double rg_delta = 0.1;
  int rg_trials = 500;
  auto* regret = app.add_subcommand("regret-sim", "Regret Monte Carlo for the empirical robust lottery");
  regret->add_option("margins", rg_in, "Margins JSON; matrices are treated as exact")
      ->required();
  regret->add_option("--weights", rg_weights, "True mixture (default: vote shares)")
      ->delimiter(',');
  regret->add_option("--n", rg_n, "Group labels drawn per trial")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  regret->add_option("--delta", rg_delta, "Confidence level")
      ->capture_default_str()
      ->check(CLI::Range(1e-12, 1.0));
  regret->add_option("--trials", rg_trials, "Number of trials")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  regret->add_option("--seed", rg_seed, "Seed for the regret stream")->capture_default_str();
  regret->add_option("-o,--output", rg_prefix, "Output prefix")->required();
  regret->footer(kRegretColumns);
  regret->callback([&] {
    action = [&] {
      const GroupMargins gm = LoadMargins(rg_in);
      const auto samples = RegretSimulation(gm, ResolveWeights(gm, rg_weights), rg_n,
                                            rg_delta, rg_trials, rg_seed);
      const RegretSummary sum = SummarizeRegret(samples);
      EmitPair(rg_prefix, RegretToCsv(samples), RegretToJson(samples, rg_n, rg_delta), out);
      out << "coverage " << FormatDouble(sum.coverage) << ", within bound "
          << FormatDouble(sum.within_bound) << '\n';
    };
  });

  // report
  std::string rp_in, rp_prefix;
  std::size_t rp_top = 10;
  std::vector<double> rp_weights;
  auto* report = app.add_subcommand("report", "Lotteries per group and reversal-rate table");
  report->add_option("margins", rp_in, "Margins JSON from ingest")->required();
  report->add_option("--top", rp_top, "Reversal pairs to list")->capture_default_str();
  report->add_option("--weights", rp_weights, "Group weights (default: vote shares)")
      ->delimiter(',');
  report->add_option("-o,--output", rp_prefix, "Output prefix");
  report->footer(kReportColumns);
  report->callback([&] {
    action = [&] {
      const GroupMargins gm = LoadMargins(rp_in);
      const MixtureWeights w = ResolveWeights(gm, rp_weights);
      Json doc;
      doc["roster"] = gm.roster;
      doc["groups"] = gm.groups;
      doc["weights"] = w.weights();
      std::ostringstream text;
      auto describe = [&](const std::string& label, const MarginMatrix& m) {
        const Lottery lot = MaximalLottery(m);
        text << label << ":";
        for (std::size_t i : lot.Support()) {
          text << ' ' << gm.roster[i] << '=' << FormatDouble(lot.probs[i]);
        }
        text << '\n';
        return LotteryToJson(lot);
      };
      Json per = Json::object();
      for (std::size_t k = 0; k < gm.num_groups(); ++k) {
        per[gm.groups[k]] = describe("ml[" + gm.groups[k] + "]", gm.per_group[k]);
      }
      doc["per_group_ml"] = std::move(per);
      doc["pooled_ml"] = describe("ml[pooled]", PooledMatrix(gm, w));
      std::string csv = "model_a,model_b,reversal_rate\n";
      Json rev = Json::array();
      if (gm.num_groups() >= 2) {
        text << "top reversal pairs:\n";
        for (const auto& e : TopReversalPairs(gm, w, rp_top)) {
          text << "  " << gm.roster[e.i] << " vs " << gm.roster[e.j] << ": "
               << FormatDouble(e.rate) << '\n';
          csv += gm.roster[e.i] + "," + gm.roster[e.j] + "," + FormatDouble(e.rate) + "\n";
          rev.push_back({{"model_a", gm.roster[e.i]},
                         {"model_b", gm.roster[e.j]},
                         {"reversal_rate", e.rate}});
        }
      } else {
        text << "reversal rates need at least two groups\n";
      }
      doc["reversal_pairs"] = std::move(rev);
      out << text.str();
      if (!rp_prefix.empty()) EmitPair(rp_prefix, csv, doc, out);
    };
  });

  // synth
  SynthConfig synth_cfg;
  std::string synth_out, synth_truth;
  std::vector<std::string> synth_pairs;
  auto* synth = app.add_subcommand("synth", "Generate synthetic votes with planted structure");
  synth->add_option("--models", synth_cfg.m, "Number of models")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000));
  synth->add_option("--groups", synth_cfg.k, "Number of groups")
      ->capture_default_str()
      ->check(CLI::Range(1, 1000));
  synth->add_option("--cycle", synth_cfg.cycle_strength,
                    "Strength of a 3-cycle planted in group_00, in [0, 1]")
      ->capture_default_str();
  synth->add_option("--reversal", synth_pairs,
                    "Pairs i-j whose sign flips between even and odd groups")
      ->delimiter(',');
  synth->add_option("--votes-per-group", synth_cfg.votes_per_group, "Votes per group")
      ->capture_default_str();
  synth->add_option("--noise", synth_cfg.noise, "Per-group uniform perturbation half-width")
      ->capture_default_str();
  synth->add_flag("--dominated", synth_cfg.dominated, "Make the last model dominated");
  synth->add_option("--seed", synth_cfg.seed, "Seed")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Vote CSV path")->required();
  synth->add_option("--truth", synth_truth, "Also write the planted margins JSON here");
  synth->callback([&] {
    action = [&] {
      for (const auto& p : synth_pairs) {
        const auto dash = p.find('-');
        try {
          if (dash == std::string::npos) throw std::invalid_argument(p);
          synth_cfg.reversal_pairs.emplace_back(std::stoul(p.substr(0, dash)),
                                                std::stoul(p.substr(dash + 1)));
        } catch (const std::logic_error&) {
          throw InputError("--reversal expects pairs like 0-1, got '" + p + "'");
        }
      }
      const GroupMargins truth = PlantMatrices(synth_cfg);
      const VoteTable votes = SampleVotes(truth, synth_cfg);
      WriteFileAtomic(synth_out, VotesToCsv(votes));
      if (!synth_truth.empty()) {
        WriteFileAtomic(synth_truth, GroupMarginsToJson(truth).dump(2) + "\n");
      }
      out << "wrote " << votes.size() << " votes to " << synth_out << '\n';
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    action();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace mlot
