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

// Experiment protocols built on the solvers: radius sweeps with bootstrap
// error bars, train/test generalization gaps, cost-constrained frontiers,
// regret Monte Carlo, and a synthetic vote generator with planted structure.
//
// Everything here runs sequentially and draws randomness only from named
// substreams of the caller's seed, so equal inputs give bit-identical output.

#ifndef MLOT_EVALHARNESS_H_
#define MLOT_EVALHARNESS_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlot/lottery.h"
#include "mlot/prefdata.h"
#include "mlot/robust.h"

namespace mlot {

struct MeanStderr {
  double mean = 0.0;
  // Sample standard deviation across bootstrap replicates (the bootstrap
  // estimate of the standard error); 0 with fewer than two replicates.
  double std_error = 0.0;
};

MeanStderr Summarize(std::span<const double> values);

// Opponent used when scoring a lottery against a group.
//  kWorst:   the group's best pure response, 1/2 + 1/2 min_j p^T M e_j.
//  kUniform: the uniform lottery over the roster, 1/2 + 1/2 p^T M u.
enum class Opponent { kWorst, kUniform };

const char* OpponentName(Opponent opponent);
Opponent ParseOpponent(const std::string& name);

enum class SplitKind { kTrain, kTest };

const char* SplitName(SplitKind split);

struct SweepOptions {
  std::vector<double> grid;
  // Replicates per split. Zero scores the given tables once, without
  // resampling.
  int bootstrap_n = 200;
  std::uint64_t seed = 0;
  double eta = 1.0;
  TiePolicy tie_policy = TiePolicy::kDrop;
  Opponent opponent = Opponent::kWorst;
  bool stratified = false;
};

struct SweepPoint {
  double rho = 0.0;
  SplitKind split = SplitKind::kTrain;
  MeanStderr overall;
  std::vector<MeanStderr> per_group;  // indexed like the table's groups
  MeanStderr worst_group;
  Lottery lottery;  // the robust lottery fitted on the training table
};

// Win rate of p against one margin matrix under the chosen opponent.
double ScoreLottery(std::span<const double> p, const Matrix& m,
                    Opponent opponent);

// For each radius: fit the robust lottery on the training margins centered
// at the training vote shares, then score it on bootstrap replicates of both
// tables. Returns a train point followed by a test point for every radius.
// Replicate r draws training substream 2r and test substream 2r+1.
//
// Throws InputError when the tables disagree on roster or groups, when the
// grid is empty, or when the test table has votes in a group that has none
// in the training table.
std::vector<SweepPoint> SweepRho(const VoteTable& train, const VoteTable& test,
                                 const SweepOptions& options);

struct GapPoint {
  double rho = 0.0;
  double gap = 0.0;  // overall train mean minus overall test mean
};

// Points are paired by position; the radii must agree exactly.
std::vector<GapPoint> GeneralizationGap(std::span<const SweepPoint> train,
                                        std::span<const SweepPoint> test);

struct FrontierPoint {
  double budget = 0.0;
  bool feasible = false;
  Lottery lottery;  // empty when infeasible
  double worst_case_win_rate = 0.0;  // 1/2 + 1/2 robust value; NaN if infeasible
  double expected_cost = 0.0;        // NaN if infeasible
};

// One robust solve per budget B with the extra constraint sum_i c_i p_i <= B.
// Budgets below the cheapest model come back marked infeasible.
std::vector<FrontierPoint> CostFrontier(const GroupMargins& gm,
                                        std::span<const double> costs,
                                        std::span<const double> budgets,
                                        double rho,
                                        const MixtureWeights& center);

struct RegretSample {
  int trial = 0;
  double rho_used = 0.0;
  double regret = 0.0;  // -V(p_hat) on the true pooled matrix
  double tv_distance = 0.0;  // (1/2) |w_hat - w_star|_1
  bool covered = false;      // tv_distance <= rho_used
  double bound = 0.0;
};

// Each trial draws n group labels from w_star, centers a TV ball of radius
// RhoFromData(n, K, delta) at the empirical shares, solves for the robust
// lottery and scores it on the exact pooled matrix under w_star.
std::vector<RegretSample> RegretSimulation(const GroupMargins& gm,
                                           const MixtureWeights& w_star,
                                           std::uint64_t n, double delta,
                                           int trials, std::uint64_t seed);

struct RegretSummary {
  double coverage = 0.0;        // fraction of covered trials
  double within_bound = 0.0;    // fraction with regret <= bound
  MeanStderr regret;
};

RegretSummary SummarizeRegret(std::span<const RegretSample> samples);

struct SynthConfig {
  std::size_t m = 5;
  std::size_t k = 2;
  // Strength of a 0 -> 1 -> 2 -> 0 cycle planted in group 0 (needs m >= 3).
  // Zero plants no cycle.
  double cycle_strength = 0.0;
  // Pairs whose sign is positive in even groups and negative in odd groups.
  std::vector<std::pair<std::size_t, std::size_t>> reversal_pairs;
  // Votes sampled per group, spread round-robin over all model pairs.
  std::uint64_t votes_per_group = 1000;
  std::uint64_t seed = 0;
  // Makes the last model strictly worse than the second to last in every
  // group.
  bool dominated = false;
  // Half-width of uniform per-group perturbations added to every entry.
  double noise = 0.0;
};

// Ids "model_00", "model_01", ... and "group_00", ...
std::vector<std::string> SynthRoster(std::size_t m);
std::vector<std::string> SynthGroups(std::size_t k);

// True per-group margins. Base margins 0.4 (j - i) / (m - 1) make model 0 the
// Condorcet winner; the cycle, noise (clamped to [-0.95, 0.95]), reversals
// (magnitude at least 0.05) and dominated model are layered on in that order.
GroupMargins PlantMatrices(const SynthConfig& config);

// Samples votes from the planted matrices: model_a wins pair (i, j) with
// probability 1/2 + 1/2 M_ij.
VoteTable SampleVotes(const GroupMargins& truth, const SynthConfig& config);

// PlantMatrices followed by SampleVotes.
VoteTable SynthGenerate(const SynthConfig& config);

struct ReversalEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double rate = 0.0;
};

// All pairs i < j ranked by ReversalRate (descending, ties by index); at most
// `top` entries.
std::vector<ReversalEntry> TopReversalPairs(const GroupMargins& gm,
                                            const MixtureWeights& w,
                                            std::size_t top);

}  // namespace mlot

#endif  // MLOT_EVALHARNESS_H_
