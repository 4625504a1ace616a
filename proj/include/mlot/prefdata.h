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

// Pairwise vote ingestion and per-group majority-margin matrices.

#ifndef MLOT_PREFDATA_H_
#define MLOT_PREFDATA_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlot/common.h"

namespace mlot {

enum class Outcome { kAWins, kBWins, kTie };

struct VoteRecord {
  std::string model_a;
  std::string model_b;
  Outcome outcome = Outcome::kAWins;
  std::string group;
  double weight = 1.0;

  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

// Records plus the sorted rosters of models and groups they reference.
class VoteTable {
 public:
  VoteTable() = default;
  // Roster and groups are the sorted distinct ids found in `records`.
  explicit VoteTable(std::vector<VoteRecord> records);
  // Explicit roster/groups (e.g. to keep ids that have no votes in a split).
  VoteTable(std::vector<VoteRecord> records, std::vector<std::string> roster,
            std::vector<std::string> groups);

  const std::vector<VoteRecord>& records() const { return records_; }
  const std::vector<std::string>& roster() const { return roster_; }
  const std::vector<std::string>& groups() const { return groups_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  std::size_t ModelIndex(const std::string& id) const;
  std::size_t GroupIndex(const std::string& id) const;

 private:
  void Validate() const;

  std::vector<VoteRecord> records_;
  std::vector<std::string> roster_;
  std::vector<std::string> groups_;
};

enum class VoteFormat { kCsv, kJsonl };

struct ParseOptions {
  // Column (CSV) or key (JSONL) holding the group label.
  std::string group_field = "group";
};

// Winner tokens: "a", "b", "tie". The LMArena spellings "model_a",
// "model_b", "tie (bothbad)" are accepted as aliases.
VoteTable ParseVotes(std::istream& input, VoteFormat format,
                     const ParseOptions& options = {});

// Keeps records whose group is in `allowed`; the group list shrinks to the
// allowed groups that were present. `dropped` receives the number of records
// removed.
VoteTable FilterGroups(const VoteTable& votes,
                       std::span<const std::string> allowed,
                       std::size_t* dropped = nullptr);

enum class TiePolicy { kDrop, kHalfWin };

const char* TiePolicyName(TiePolicy policy);
TiePolicy ParseTiePolicy(const std::string& name);

struct MarginMatrix {
  std::vector<std::string> roster;
  Matrix margins;  // skew-symmetric, entries in [-1, 1]
  Matrix counts;   // symmetric, unsmoothed n_ij

  std::size_t size() const { return roster.size(); }
  // Checks skew-symmetry (to `tol`), the [-1, 1] range and shape.
  void Validate(double tol = 1e-12) const;
};

// Margin matrix with zero counts, validated.
MarginMatrix MakeMarginMatrix(std::vector<std::string> roster, Matrix margins);

class MixtureWeights {
 public:
  MixtureWeights() = default;
  // Throws InputError unless entries are nonnegative and sum to 1 within
  // 1e-12.
  explicit MixtureWeights(std::vector<double> weights);
  // Normalizes nonnegative entries with a positive sum.
  static MixtureWeights Normalized(std::vector<double> weights);
  static MixtureWeights Uniform(std::size_t k);

  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t k) const { return weights_[k]; }

 private:
  std::vector<double> weights_;
};

struct GroupMargins {
  std::vector<std::string> roster;
  std::vector<std::string> groups;
  std::vector<MarginMatrix> per_group;
  std::vector<double> votes_per_group;
  double eta = 0.0;
  TiePolicy tie_policy = TiePolicy::kDrop;

  std::size_t num_models() const { return roster.size(); }
  std::size_t num_groups() const { return groups.size(); }
  void Validate() const;
};

// Wraps planted matrices as GroupMargins with zero counts.
GroupMargins MakeGroupMargins(std::vector<std::string> roster,
                              std::vector<std::string> groups,
                              std::vector<Matrix> matrices);

// Margins per group: with smoothing eta, w'_ij = w_ij + eta and
// M_ij = (w'_ij - w'_ji) / (w'_ij + w'_ji); pairs with no smoothed mass get 0.
GroupMargins BuildMargins(const VoteTable& votes, double eta,
                          TiePolicy tie_policy = TiePolicy::kDrop);

// sum_k w_k M^(k).
MarginMatrix PooledMatrix(const GroupMargins& gm, const MixtureWeights& w);

// Group shares of total record weight.
MixtureWeights EmpiricalWeights(const VoteTable& votes);

// Shares of GroupMargins::votes_per_group.
MixtureWeights VoteShareWeights(const GroupMargins& gm);

// 1/2 + 1/2 p^T M q.
double WinRate(std::span<const double> p, const MarginMatrix& m,
               std::span<const double> q);

// Probability that two distinct groups drawn from w order (i, j) with
// different signs of the margin. Zero is its own sign class.
double ReversalRate(const GroupMargins& gm, const MixtureWeights& w,
                    std::size_t i, std::size_t j);

// Seeded uniform shuffle, then floor(train_fraction * N) records go to the
// first table. Both halves keep the full roster and group lists.
std::pair<VoteTable, VoteTable> Split(const VoteTable& votes,
                                      double train_fraction,
                                      std::uint64_t seed);

// N draws with replacement. `replicate` selects an independent substream.
VoteTable BootstrapResample(const VoteTable& votes, std::uint64_t seed,
                            std::uint64_t replicate = 0);

// Resamples within each group, preserving per-group record counts.
VoteTable StratifiedBootstrapResample(const VoteTable& votes,
                                      std::uint64_t seed,
                                      std::uint64_t replicate = 0);

}  // namespace mlot

#endif  // MLOT_PREFDATA_H_
