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

// Maximal lotteries of a single margin matrix: the maximin strategies of the
// symmetric zero-sum game with payoff M.

#ifndef MLOT_LOTTERY_H_
#define MLOT_LOTTERY_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlot/common.h"
#include "mlot/prefdata.h"

namespace mlot {

struct Lottery {
  std::vector<std::string> roster;
  std::vector<double> probs;
  // Guarantee achieved: min over opponents (and over the ambiguity set, for
  // robust lotteries) of p^T M q.
  double value = 0.0;

  std::vector<std::size_t> Support(double eps = kSupportEps) const;
};

// Clears probabilities below 1e-12 and renormalizes, so that e.g. a solver
// output of (1 - 1e-16, 1e-16) becomes exactly e_1.
std::vector<double> CleanProbabilities(std::span<const double> probs);

// min_j p^T M e_j.
double GuaranteeValue(std::span<const double> p, const Matrix& m);

// The deterministic vertex of ML(M) returned by the simplex solver. Throws
// SolverError (carrying an LP dump) if the solve fails.
Lottery MaximalLottery(const MarginMatrix& m);

// Lowest-index i with M_ij > 0 (strict) or >= 0 (non-strict) for all j != i.
std::optional<std::size_t> CondorcetWinner(const MarginMatrix& m, bool strict);

// Indices carrying positive probability in some maximal lottery: i is a
// member iff max p_i over {p in simplex : p^T M e_j >= 0 for all j} exceeds
// kSupportEps.
std::vector<std::size_t> BipartisanSet(const MarginMatrix& m);

struct CloneMap {
  std::vector<std::string> original_roster;
  std::vector<std::string> expanded_roster;
  // Expanded id -> original id (identity on non-clones).
  std::map<std::string, std::string> parent;
};

struct CloneExpansion {
  MarginMatrix matrix;
  CloneMap map;
};

// Appends handicaps.size() weak clones of alternative `parent`. Clone c
// scores M_parent,x - h_c against each original x != parent, -h_c against
// the parent, and h_c' - h_c against clone c'. Clone ids are
// "<parent>#clone<k>" (1-based). Throws InputError if an entry would leave
// [-1, 1] or a handicap is negative.
CloneExpansion ExpandClones(const MarginMatrix& m, std::size_t parent,
                            std::span<const double> handicaps);

// Raw expansion of a bare matrix (roster-free), shared with the robust
// module.
Matrix ExpandClonesMatrix(const Matrix& m, std::size_t parent,
                          std::span<const double> handicaps);

CloneMap MakeCloneMap(const std::vector<std::string>& roster,
                      std::size_t parent, std::size_t num_clones);

// Moves clone mass onto parents. Throws InputError on roster mismatch.
Lottery ProjectLottery(const Lottery& expanded, const CloneMap& map);

}  // namespace mlot

#endif  // MLOT_LOTTERY_H_
