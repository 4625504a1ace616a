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

// Robust lotteries: maximize the worst-case guarantee
//
//   V(p, S) = min_{M in S} min_j p^T M e_j
//
// over an ambiguity set S of margin matrices. Two representations of S are
// supported:
//
//  * a total-variation ball of mixture weights around a reference mixture
//    w0 over K group matrices, S = {sum_k w_k M^(k) : TV(w, w0) <= rho}, and
//  * the convex hull of an explicit finite list of matrices.
//
// For the TV ball the robust lottery is the solution of one LP with O(mK)
// variables obtained by dualizing the inner minimization over w for each
// pure opponent a:
//
//   max  t
//   s.t. sum_i p_i = 1, p >= 0
//        t <= mu_a - 2 rho lambda_a + sum_k w0_k gamma_ak       for all a
//        mu_a + gamma_ak <= p^T M^(k) e_a                       for all a, k
//        -lambda_a <= gamma_ak <= lambda_a,  lambda_a >= 0
//
// For the vertex hull, v(p, .) is concave in M, so the minimum over the hull
// is attained at a listed matrix and the LP has one row per (vertex, a).

#ifndef MLOT_ROBUST_H_
#define MLOT_ROBUST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mlot/common.h"
#include "mlot/lottery.h"
#include "mlot/prefdata.h"

namespace mlot {

struct TvBall {
  GroupMargins margins;
  MixtureWeights center;
  double radius = 0.0;
};

struct VertexHull {
  std::vector<MarginMatrix> vertices;
};

class AmbiguitySet {
 public:
  // Throws InputError unless radius is in [0, 1], the center has one weight
  // per group and the margins validate.
  static AmbiguitySet MakeTvBall(GroupMargins margins, MixtureWeights center,
                                 double radius);
  // Throws InputError on an empty list, roster mismatch or invalid matrices.
  static AmbiguitySet MakeVertexHull(std::vector<MarginMatrix> vertices);
  // Hull of a single matrix: no ambiguity.
  static AmbiguitySet Singleton(MarginMatrix m);

  bool is_tv_ball() const { return std::holds_alternative<TvBall>(set_); }
  const TvBall& tv_ball() const;
  const VertexHull& vertex_hull() const;
  const std::vector<std::string>& roster() const;
  std::size_t num_models() const { return roster().size(); }

 private:
  explicit AmbiguitySet(std::variant<TvBall, VertexHull> set)
      : set_(std::move(set)) {}
  std::variant<TvBall, VertexHull> set_;
};

// min{min_k w0_k, 1 - max_k w0_k}: below this radius the TV ball stays inside
// the simplex in every direction and the inner minimum has a closed form.
double SmallRadiusThreshold(const MixtureWeights& center);

struct WeightedMin {
  double value = 0.0;
  std::vector<double> weights;  // a minimizing w
};

// min over w in the TV ball (intersected with the simplex) of sum_k w_k c_k.
// Closed form mean - radius * (max c - min c) when radius <= threshold,
// otherwise the primal LP over (w, s).
WeightedMin TvInnerMin(std::span<const double> coeffs,
                       const MixtureWeights& center, double radius);

struct InnerMinResult {
  double value = 0.0;
  std::size_t alternative = 0;  // binding pure opponent a
  // TV ball: minimizing mixture for that opponent; vertex hull: empty.
  std::vector<double> weights;
  std::size_t vertex = 0;  // vertex hull only
};

InnerMinResult InnerMin(std::span<const double> p, const AmbiguitySet& amb);
double InnerMinValue(std::span<const double> p, const AmbiguitySet& amb);
double InnerMinValue(const Lottery& p, const AmbiguitySet& amb);

// coeffs . p <= rhs.
struct LotteryConstraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

struct RobustDuals {
  std::vector<double> mu;
  std::vector<double> lambda;
  std::vector<std::vector<double>> gamma;  // [alternative][group]
};

struct RobustSolveReport {
  Lottery lottery;       // value = InnerMinValue(lottery, amb)
  double robust_value = 0.0;  // LP optimum t
  RobustDuals duals;     // empty for vertex hulls
  std::vector<std::size_t> active_alternatives;
  InnerMinResult worst_case;  // diagnostics; not unique in general
  double rho = 0.0;
  std::vector<double> center;
};

// Throws InfeasibleError if the extra constraints leave no lottery and
// SolverError (with an LP dump) on any other solver failure.
RobustSolveReport RobustLottery(
    const AmbiguitySet& amb,
    std::span<const LotteryConstraint> extra_constraints = {});

// Alternatives with positive weight in some robust lottery: solve for v*,
// then maximize p_i subject to t >= v* - s for s = 1e-8. Index i is a member
// when that optimum, extrapolated to s = 0 from s and 2s, exceeds
// kSupportEps; a plain slack would admit weight s / margin on alternatives
// that lose to the optimum by small margins.
std::vector<std::size_t> RobustBipartisanSet(const AmbiguitySet& amb);

struct EntryRange {
  double min = 0.0;
  double max = 0.0;
};

// Range of M_ij over the ambiguity set.
EntryRange MarginRange(const AmbiguitySet& amb, std::size_t i, std::size_t j);

// Lowest index i with min_S M_ij >= 0 for all j; strict additionally needs
// max_S M_ij > 0 for every j != i.
std::optional<std::size_t> RobustCondorcetWinner(const AmbiguitySet& amb,
                                                 bool strict);

// y such that some x != y has min_S min_j (M_xj - M_yj) > 0.
std::vector<std::size_t> RobustDominated(const AmbiguitySet& amb);

// min{1, sqrt(K/n) + sqrt((2/n) log(2/delta))}.
double RhoFromData(std::uint64_t n, std::size_t k, double delta);

// 4 sqrt(K/n) + 4 sqrt((2/n) log(2/delta)).
double RegretBound(std::uint64_t n, std::size_t k, double delta);

// ceil(max{(8/eps^2) log(4m), (32 rho^2/eps^2) log(8mK)}).
std::size_t SparsifySampleSize(std::size_t m, std::size_t k, double eps,
                               double rho);

struct SparsifyResult {
  Lottery lottery;
  std::size_t sample_size = 0;
  double target = 0.0;  // v* - eps
  int trials_run = 0;
};

// Empirical lotteries of sample_size iid draws from p_star, best of `trials`
// independent batches. Requires a TV ball with radius <= threshold. Throws
// SolverError if no batch reaches V(p_star) - eps.
SparsifyResult Sparsify(const Lottery& p_star, const AmbiguitySet& amb,
                        double eps, int trials, std::uint64_t seed);

// Minkowski mix lambda*A + (1-lambda)*B of two vertex hulls, represented by
// the hull of all pairwise vertex mixes (exact duplicates removed).
AmbiguitySet MixtureAmbiguity(const AmbiguitySet& a, const AmbiguitySet& b,
                              double lambda);

// w0 and w0 - rho e_k+ + rho e_k- over ordered pairs k+ != k-. Throws
// InputError for radius above the small-radius threshold.
std::vector<MixtureWeights> TvBallVertices(const MixtureWeights& center,
                                           double radius);

// Equivalent vertex hull of a small-radius TV ball.
AmbiguitySet ToVertexHull(const AmbiguitySet& tv_ball);

struct AmbiguityCloneExpansion {
  AmbiguitySet set;
  CloneMap map;
};

// Applies the handicap clone construction to every group matrix (TV ball) or
// vertex (hull). The construction is affine in M with weights summing to
// one, so it commutes with mixing.
AmbiguityCloneExpansion ExpandClones(const AmbiguitySet& amb,
                                     std::size_t parent,
                                     std::span<const double> handicaps);

}  // namespace mlot

#endif  // MLOT_ROBUST_H_
