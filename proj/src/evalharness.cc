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

#include "mlot/evalharness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mlot/rng.h"

namespace mlot {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Scores {
  double overall = 0.0;
  std::vector<double> per_group;
  double worst = 0.0;
};

Scores ScoreTable(std::span<const double> p, const VoteTable& table,
                  const SweepOptions& options) {
  const GroupMargins gm = BuildMargins(table, options.eta, options.tie_policy);
  Scores s;
  s.per_group.resize(gm.num_groups());
  s.worst = std::numeric_limits<double>::infinity();
  double total_votes = 0.0;
  for (std::size_t k = 0; k < gm.num_groups(); ++k) {
    s.per_group[k] = ScoreLottery(p, gm.per_group[k].margins, options.opponent);
    total_votes += gm.votes_per_group[k];
    if (gm.votes_per_group[k] > 0.0) s.worst = std::min(s.worst, s.per_group[k]);
  }
  if (total_votes > 0.0) {
    const MarginMatrix pooled = PooledMatrix(gm, VoteShareWeights(gm));
    s.overall = ScoreLottery(p, pooled.margins, options.opponent);
  } else {
    s.overall = 0.5;
  }
  if (!std::isfinite(s.worst)) s.worst = 0.5;
  return s;
}

VoteTable Replicate(const VoteTable& table, const SweepOptions& options,
                    std::uint64_t index) {
  return options.stratified
             ? StratifiedBootstrapResample(table, options.seed, index)
             : BootstrapResample(table, options.seed, index);
}

void CheckSweepInputs(const VoteTable& train, const VoteTable& test,
                      const SweepOptions& options) {
  if (options.grid.empty()) throw InputError("sweep: empty radius grid");
  if (options.bootstrap_n < 0) throw InputError("sweep: negative bootstrap count");
  for (double rho : options.grid) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw InputError("sweep: radius " + FormatDouble(rho) + " outside [0, 1]");
    }
  }
  if (train.roster() != test.roster() || train.groups() != test.groups()) {
    throw InputError("sweep: train and test tables must share roster and groups");
  }
  if (train.empty()) throw InputError("sweep: empty training table");
  std::vector<bool> in_train(train.groups().size(), false);
  for (const auto& r : train.records()) {
    if (r.weight > 0.0) in_train[train.GroupIndex(r.group)] = true;
  }
  for (const auto& r : test.records()) {
    if (r.weight > 0.0 && !in_train[test.GroupIndex(r.group)]) {
      throw InputError("sweep: group '" + r.group +
                       "' has test votes but no training votes");
    }
  }
}

double Clamp(double v, double bound) { return std::clamp(v, -bound, bound); }

}  // namespace

MeanStderr Summarize(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

const char* OpponentName(Opponent opponent) {
  return opponent == Opponent::kWorst ? "worst" : "uniform";
}

Opponent ParseOpponent(const std::string& name) {
  if (name == "worst") return Opponent::kWorst;
  if (name == "uniform") return Opponent::kUniform;
  throw InputError("unknown opponent mode '" + name + "' (expected worst|uniform)");
}

const char* SplitName(SplitKind split) {
  return split == SplitKind::kTrain ? "train" : "test";
}

double ScoreLottery(std::span<const double> p, const Matrix& m,
                    Opponent opponent) {
  const std::vector<double> col = LeftMultiply(p, m);
  if (opponent == Opponent::kWorst) {
    return 0.5 + 0.5 * *std::min_element(col.begin(), col.end());
  }
  double sum = 0.0;
  for (double c : col) sum += c;
  return 0.5 + 0.5 * sum / static_cast<double>(col.size());
}

std::vector<SweepPoint> SweepRho(const VoteTable& train, const VoteTable& test,
                                 const SweepOptions& options) {
  CheckSweepInputs(train, test, options);
  const GroupMargins train_gm =
      BuildMargins(train, options.eta, options.tie_policy);
  const MixtureWeights center = VoteShareWeights(train_gm);

  std::vector<Lottery> lotteries;
  for (double rho : options.grid) {
    const AmbiguitySet amb = AmbiguitySet::MakeTvBall(train_gm, center, rho);
    lotteries.push_back(RobustLottery(amb).lottery);
  }

  const std::size_t n_grid = options.grid.size();
  const std::size_t n_groups = train.groups().size();
  // samples[split][grid] -> per-replicate scores
  std::vector<std::vector<std::vector<Scores>>> samples(
      2, std::vector<std::vector<Scores>>(n_grid));
  auto score_all = [&](const VoteTable& tr, const VoteTable& te) {
    for (std::size_t g = 0; g < n_grid; ++g) {
      samples[0][g].push_back(ScoreTable(lotteries[g].probs, tr, options));
      samples[1][g].push_back(ScoreTable(lotteries[g].probs, te, options));
    }
  };
  if (options.bootstrap_n == 0) {
    score_all(train, test);
  } else {
    for (int r = 0; r < options.bootstrap_n; ++r) {
      const auto idx = static_cast<std::uint64_t>(r);
      score_all(Replicate(train, options, 2 * idx),
                Replicate(test, options, 2 * idx + 1));
    }
  }

  std::vector<SweepPoint> out;
  for (std::size_t g = 0; g < n_grid; ++g) {
    for (int split = 0; split < 2; ++split) {
      const auto& reps = samples[static_cast<std::size_t>(split)][g];
      SweepPoint pt;
      pt.rho = options.grid[g];
      pt.split = split == 0 ? SplitKind::kTrain : SplitKind::kTest;
      pt.lottery = lotteries[g];
      std::vector<double> buf(reps.size());
      for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = reps[r].overall;
      pt.overall = Summarize(buf);
      for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = reps[r].worst;
      pt.worst_group = Summarize(buf);
      for (std::size_t k = 0; k < n_groups; ++k) {
        for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = reps[r].per_group[k];
        pt.per_group.push_back(Summarize(buf));
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

std::vector<GapPoint> GeneralizationGap(std::span<const SweepPoint> train,
                                        std::span<const SweepPoint> test) {
  if (train.size() != test.size()) {
    throw InputError("generalization gap: sweeps have different lengths");
  }
  std::vector<GapPoint> out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].rho != test[i].rho) {
      throw InputError("generalization gap: radius grids do not match at index " +
                       std::to_string(i));
    }
    out.push_back({train[i].rho, train[i].overall.mean - test[i].overall.mean});
  }
  return out;
}

std::vector<FrontierPoint> CostFrontier(const GroupMargins& gm,
                                        std::span<const double> costs,
                                        std::span<const double> budgets,
                                        double rho,
                                        const MixtureWeights& center) {
  const std::size_t m = gm.num_models();
  if (costs.size() != m) {
    throw InputError("frontier: expected " + std::to_string(m) + " costs, got " +
                     std::to_string(costs.size()));
  }
  for (double c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw InputError("frontier: costs must be finite and nonnegative");
    }
  }
  const AmbiguitySet amb = AmbiguitySet::MakeTvBall(gm, center, rho);
  const double cheapest = *std::min_element(costs.begin(), costs.end());
  std::vector<FrontierPoint> out;
  for (double budget : budgets) {
    if (!std::isfinite(budget)) throw InputError("frontier: budgets must be finite");
    FrontierPoint pt;
    pt.budget = budget;
    pt.worst_case_win_rate = kNaN;
    pt.expected_cost = kNaN;
    if (budget >= cheapest) {
      const LotteryConstraint budget_row{{costs.begin(), costs.end()}, budget};
      try {
        const RobustSolveReport rep = RobustLottery(amb, std::span(&budget_row, 1));
        pt.feasible = true;
        pt.lottery = rep.lottery;
        pt.worst_case_win_rate = 0.5 + 0.5 * rep.robust_value;
        pt.expected_cost = Dot(rep.lottery.probs, costs);
      } catch (const InfeasibleError&) {
        pt.feasible = false;
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<RegretSample> RegretSimulation(const GroupMargins& gm,
                                           const MixtureWeights& w_star,
                                           std::uint64_t n, double delta,
                                           int trials, std::uint64_t seed) {
  gm.Validate();
  const std::size_t k = gm.num_groups();
  if (w_star.size() != k) {
    throw InputError("regret: true mixture has " + std::to_string(w_star.size()) +
                     " weights for " + std::to_string(k) + " groups");
  }
  if (n == 0) throw InputError("regret: n must be positive");
  if (trials < 0) throw InputError("regret: negative trial count");
  const double rho = RhoFromData(n, k, delta);
  const double bound = RegretBound(n, k, delta);
  const AmbiguitySet truth = AmbiguitySet::Singleton(PooledMatrix(gm, w_star));

  std::vector<RegretSample> out;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, "regret", static_cast<std::uint64_t>(t));
    std::vector<double> counts(k, 0.0);
    for (std::uint64_t d = 0; d < n; ++d) counts[rng.Categorical(w_star.weights())] += 1.0;
    const MixtureWeights w_hat = MixtureWeights::Normalized(counts);
    const AmbiguitySet amb = AmbiguitySet::MakeTvBall(gm, w_hat, rho);
    const Lottery p_hat = RobustLottery(amb).lottery;

    RegretSample s;
    s.trial = t;
    s.rho_used = rho;
    s.regret = -InnerMinValue(p_hat, truth);
    double l1 = 0.0;
    for (std::size_t g = 0; g < k; ++g) l1 += std::abs(w_hat[g] - w_star[g]);
    s.tv_distance = 0.5 * l1;
    s.covered = s.tv_distance <= rho;
    s.bound = bound;
    out.push_back(s);
  }
  return out;
}

RegretSummary SummarizeRegret(std::span<const RegretSample> samples) {
  RegretSummary out;
  if (samples.empty()) return out;
  std::vector<double> regrets;
  double covered = 0.0, within = 0.0;
  for (const auto& s : samples) {
    regrets.push_back(s.regret);
    covered += s.covered ? 1.0 : 0.0;
    within += s.regret <= s.bound ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(samples.size());
  out.coverage = covered / n;
  out.within_bound = within / n;
  out.regret = Summarize(regrets);
  return out;
}

std::vector<std::string> SynthRoster(std::size_t m) {
  std::vector<std::string> out;
  char buf[32];
  for (std::size_t i = 0; i < m; ++i) {
    std::snprintf(buf, sizeof buf, "model_%02zu", i);
    out.emplace_back(buf);
  }
  return out;
}

std::vector<std::string> SynthGroups(std::size_t k) {
  std::vector<std::string> out;
  char buf[32];
  for (std::size_t i = 0; i < k; ++i) {
    std::snprintf(buf, sizeof buf, "group_%02zu", i);
    out.emplace_back(buf);
  }
  return out;
}

GroupMargins PlantMatrices(const SynthConfig& config) {
  const std::size_t m = config.m;
  if (m < 2) throw InputError("synth: need at least two models");
  if (config.k < 1) throw InputError("synth: need at least one group");
  if (!(config.cycle_strength >= 0.0 && config.cycle_strength <= 1.0)) {
    throw InputError("synth: cycle strength must lie in [0, 1]");
  }
  if (!(config.noise >= 0.0 && config.noise <= 1.0)) {
    throw InputError("synth: noise must lie in [0, 1]");
  }
  for (const auto& [i, j] : config.reversal_pairs) {
    if (i == j || i >= m || j >= m) throw InputError("synth: invalid reversal pair");
  }
  std::vector<Matrix> mats;
  for (std::size_t g = 0; g < config.k; ++g) {
    Matrix mat(m, m, 0.0);
    auto set = [&](std::size_t i, std::size_t j, double v) {
      mat(i, j) = v;
      mat(j, i) = -v;
    };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        set(i, j, 0.4 * static_cast<double>(j - i) / static_cast<double>(m - 1));
      }
    }
    if (g == 0 && m >= 3 && config.cycle_strength > 0.0) {
      const double c = config.cycle_strength;
      set(0, 1, c);
      set(1, 2, c);
      set(2, 0, c);
    }
    if (config.noise > 0.0) {
      Rng rng(config.seed, "synth-noise", g);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const double u = 2.0 * rng.Uniform01() - 1.0;
          set(i, j, Clamp(mat(i, j) + config.noise * u, 0.95));
        }
      }
    }
    for (const auto& [i, j] : config.reversal_pairs) {
      const double mag = std::max(std::abs(mat(i, j)), 0.05);
      set(i, j, g % 2 == 0 ? mag : -mag);
    }
    if (config.dominated && m >= 2) {
      const std::size_t last = m - 1, prev = m - 2;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == last || j == prev) continue;
        set(last, j, Clamp(mat(prev, j) - 0.1, 1.0));
      }
      set(last, prev, -0.1);
    }
    mats.push_back(std::move(mat));
  }
  return MakeGroupMargins(SynthRoster(m), SynthGroups(config.k), std::move(mats));
}

VoteTable SampleVotes(const GroupMargins& truth, const SynthConfig& config) {
  truth.Validate();
  const std::size_t m = truth.num_models();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
  std::vector<VoteRecord> records;
  records.reserve(static_cast<std::size_t>(config.votes_per_group) * truth.num_groups());
  for (std::size_t g = 0; g < truth.num_groups(); ++g) {
    Rng rng(config.seed, "synth", g);
    const Matrix& mat = truth.per_group[g].margins;
    for (std::uint64_t v = 0; v < config.votes_per_group; ++v) {
      const auto [i, j] = pairs[static_cast<std::size_t>(v % pairs.size())];
      VoteRecord rec;
      rec.model_a = truth.roster[i];
      rec.model_b = truth.roster[j];
      rec.outcome = rng.Bernoulli(0.5 + 0.5 * mat(i, j)) ? Outcome::kAWins
                                                           : Outcome::kBWins;
      rec.group = truth.groups[g];
      records.push_back(std::move(rec));
    }
  }
  return VoteTable(std::move(records), truth.roster, truth.groups);
}

VoteTable SynthGenerate(const SynthConfig& config) {
  return SampleVotes(PlantMatrices(config), config);
}

std::vector<ReversalEntry> TopReversalPairs(const GroupMargins& gm,
                                            const MixtureWeights& w,
                                            std::size_t top) {
  std::vector<ReversalEntry> all;
  for (std::size_t i = 0; i < gm.num_models(); ++i) {
    for (std::size_t j = i + 1; j < gm.num_models(); ++j) {
      all.push_back({i, j, ReversalRate(gm, w, i, j)});
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ReversalEntry& a, const ReversalEntry& b) {
                     return a.rate > b.rate;
                   });
  if (all.size() > top) all.resize(top);
  return all;
}

}  // namespace mlot
