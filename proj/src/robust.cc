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

#include "mlot/robust.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "canonical.h"
#include "mlot/lp.h"
#include "mlot/rng.h"

namespace mlot {
namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
// Sign tests on margins combined through floating-point mixing.
constexpr double kMarginTol = 1e-12;
// Relaxed optimality used when enumerating the robust bipartisan set.
constexpr double kBipartisanSlack = 1e-8;
// Tightness threshold for reporting active alternatives.
constexpr double kActiveTol = 1e-9;

// Column indices of the robust LP.
struct RobustLayout {
  LpBuilder builder;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t mu = kNone;      // mu_a = mu + a
  std::size_t lambda = kNone;  // lambda_a = lambda + a
  std::size_t gamma = kNone;   // gamma_ak = gamma + a*K + k
};

RobustLayout BuildRobustLp(const AmbiguitySet& amb,
                           std::span<const LotteryConstraint> extra) {
  RobustLayout L;
  L.m = amb.num_models();
  LpBuilder& b = L.builder;
  LpBuilder::Terms sum;
  for (std::size_t i = 0; i < L.m; ++i) {
    sum.emplace_back(b.AddVariable("p_" + std::to_string(i), 0.0, kInf), 1.0);
  }
  b.AddEqual(std::move(sum), 1.0);
  L.t = b.AddVariable("t", -kInf, kInf, 1.0);

  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    L.k = tv.margins.num_groups();
    L.mu = b.num_variables();
    for (std::size_t a = 0; a < L.m; ++a) {
      b.AddVariable("mu_" + std::to_string(a), -kInf, kInf);
    }
    L.lambda = b.num_variables();
    for (std::size_t a = 0; a < L.m; ++a) {
      b.AddVariable("lambda_" + std::to_string(a), 0.0, kInf);
    }
    L.gamma = b.num_variables();
    for (std::size_t a = 0; a < L.m; ++a) {
      for (std::size_t k = 0; k < L.k; ++k) {
        b.AddVariable("gamma_" + std::to_string(a) + "_" + std::to_string(k),
                      -kInf, kInf);
      }
    }
    for (std::size_t a = 0; a < L.m; ++a) {
      // t - mu_a + 2 rho lambda_a - sum_k w0_k gamma_ak <= 0
      LpBuilder::Terms row{{L.t, 1.0}, {L.mu + a, -1.0}};
      if (tv.radius != 0.0) row.emplace_back(L.lambda + a, 2.0 * tv.radius);
      for (std::size_t k = 0; k < L.k; ++k) {
        if (tv.center[k] != 0.0) row.emplace_back(L.gamma + a * L.k + k, -tv.center[k]);
      }
      b.AddLessEqual(std::move(row), 0.0);
    }
    for (std::size_t a = 0; a < L.m; ++a) {
      for (std::size_t k = 0; k < L.k; ++k) {
        // mu_a + gamma_ak - sum_i p_i M^(k)_ia <= 0
        const Matrix& mk = tv.margins.per_group[k].margins;
        LpBuilder::Terms row{{L.mu + a, 1.0}, {L.gamma + a * L.k + k, 1.0}};
        for (std::size_t i = 0; i < L.m; ++i) {
          if (mk(i, a) != 0.0) row.emplace_back(i, -mk(i, a));
        }
        b.AddLessEqual(std::move(row), 0.0);
      }
    }
    for (std::size_t a = 0; a < L.m; ++a) {
      for (std::size_t k = 0; k < L.k; ++k) {
        const std::size_t g = L.gamma + a * L.k + k;
        b.AddLessEqual({{g, 1.0}, {L.lambda + a, -1.0}}, 0.0);
        b.AddLessEqual({{g, -1.0}, {L.lambda + a, -1.0}}, 0.0);
      }
    }
  } else {
    for (const MarginMatrix& v : amb.vertex_hull().vertices) {
      for (std::size_t a = 0; a < L.m; ++a) {
        LpBuilder::Terms row{{L.t, 1.0}};
        for (std::size_t i = 0; i < L.m; ++i) {
          if (v.margins(i, a) != 0.0) row.emplace_back(i, -v.margins(i, a));
        }
        b.AddLessEqual(std::move(row), 0.0);
      }
    }
  }

  for (const LotteryConstraint& c : extra) {
    if (c.coeffs.size() != L.m) {
      throw InputError("RobustLottery: extra constraint has wrong length");
    }
    LpBuilder::Terms row;
    for (std::size_t i = 0; i < L.m; ++i) {
      if (c.coeffs[i] != 0.0) row.emplace_back(i, c.coeffs[i]);
    }
    b.AddLessEqual(std::move(row), c.rhs);
  }
  return L;
}

void RequireSameRoster(const std::vector<std::string>& a,
                       const std::vector<std::string>& b, const char* what) {
  if (a != b) throw InputError(std::string(what) + ": roster mismatch");
}

// Vertex-hull inner minimum over listed matrices of a per-matrix linear
// functional.
template <typename F>
double MinOverVertices(const VertexHull& hull, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  for (const MarginMatrix& v : hull.vertices) best = std::min(best, f(v.margins));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// AmbiguitySet

AmbiguitySet AmbiguitySet::MakeTvBall(GroupMargins margins,
                                      MixtureWeights center, double radius) {
  margins.Validate();
  if (margins.num_groups() == 0) throw InputError("TV ball: no groups");
  if (center.size() != margins.num_groups()) {
    throw InputError("TV ball: center has " + std::to_string(center.size()) +
                     " weights for " + std::to_string(margins.num_groups()) +
                     " groups");
  }
  if (!(radius >= 0.0 && radius <= 1.0)) {
    throw InputError("TV ball: radius must lie in [0, 1]");
  }
  return AmbiguitySet(TvBall{std::move(margins), std::move(center), radius});
}

AmbiguitySet AmbiguitySet::MakeVertexHull(std::vector<MarginMatrix> vertices) {
  if (vertices.empty()) throw InputError("vertex hull: no matrices");
  for (const auto& v : vertices) {
    RequireSameRoster(v.roster, vertices.front().roster, "vertex hull");
    v.Validate();
  }
  return AmbiguitySet(VertexHull{std::move(vertices)});
}

AmbiguitySet AmbiguitySet::Singleton(MarginMatrix m) {
  std::vector<MarginMatrix> v;
  v.push_back(std::move(m));
  return MakeVertexHull(std::move(v));
}

const TvBall& AmbiguitySet::tv_ball() const {
  if (!is_tv_ball()) throw InputError("ambiguity set is not a TV ball");
  return std::get<TvBall>(set_);
}

const VertexHull& AmbiguitySet::vertex_hull() const {
  if (is_tv_ball()) throw InputError("ambiguity set is not a vertex hull");
  return std::get<VertexHull>(set_);
}

const std::vector<std::string>& AmbiguitySet::roster() const {
  if (is_tv_ball()) return std::get<TvBall>(set_).margins.roster;
  return std::get<VertexHull>(set_).vertices.front().roster;
}

// ---------------------------------------------------------------------------
// Inner minimization

double SmallRadiusThreshold(const MixtureWeights& center) {
  const auto& w = center.weights();
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return std::min(*lo, 1.0 - *hi);
}

WeightedMin TvInnerMin(std::span<const double> coeffs,
                       const MixtureWeights& center, double radius) {
  const std::size_t k = center.size();
  if (coeffs.size() != k) throw InputError("TvInnerMin: coefficient length mismatch");
  WeightedMin out;
  if (radius <= SmallRadiusThreshold(center)) {
    const auto [lo, hi] = std::minmax_element(coeffs.begin(), coeffs.end());
    const double mean = Dot(center.weights(), coeffs);
    out.value = mean - radius * (*hi - *lo);
    out.weights = center.weights();
    if (radius > 0.0 && *hi > *lo) {
      out.weights[static_cast<std::size_t>(hi - coeffs.begin())] -= radius;
      out.weights[static_cast<std::size_t>(lo - coeffs.begin())] += radius;
    }
    return out;
  }
  // min sum_k c_k w_k  s.t. sum w = 1, w >= 0, |w_k - w0_k| <= s_k,
  // sum s <= 2 radius.
  LpBuilder b;
  LpBuilder::Terms sum_w, sum_s;
  for (std::size_t i = 0; i < k; ++i) {
    b.AddVariable("w_" + std::to_string(i), 0.0, kInf, -coeffs[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    b.AddVariable("s_" + std::to_string(i), 0.0, kInf);
  }
  for (std::size_t i = 0; i < k; ++i) {
    sum_w.emplace_back(i, 1.0);
    sum_s.emplace_back(k + i, 1.0);
    b.AddLessEqual({{i, 1.0}, {k + i, -1.0}}, center[i]);
    b.AddLessEqual({{i, -1.0}, {k + i, -1.0}}, -center[i]);
  }
  b.AddEqual(std::move(sum_w), 1.0);
  b.AddLessEqual(std::move(sum_s), 2.0 * radius);
  const LinearProgram lp = b.Build();
  const LpSolution sol = SolveLp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError(std::string("TvInnerMin: solver returned ") +
                      LpStatusName(sol.status) + "\n" + DumpLp(lp));
  }
  out.weights.assign(sol.point.begin(), sol.point.begin() + static_cast<long>(k));
  out.value = Dot(out.weights, coeffs);
  return out;
}

InnerMinResult InnerMin(std::span<const double> p, const AmbiguitySet& amb) {
  const std::size_t m = amb.num_models();
  if (p.size() != m) throw InputError("InnerMin: lottery does not match roster");
  InnerMinResult best;
  best.value = std::numeric_limits<double>::infinity();
  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    const std::size_t k_groups = tv.margins.num_groups();
    // c[k][a] = p^T M^(k) e_a
    std::vector<std::vector<double>> c;
    for (const auto& mk : tv.margins.per_group) c.push_back(LeftMultiply(p, mk.margins));
    std::vector<double> coeffs(k_groups);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t k = 0; k < k_groups; ++k) coeffs[k] = c[k][a];
      WeightedMin wm = TvInnerMin(coeffs, tv.center, tv.radius);
      if (wm.value < best.value) {
        best.value = wm.value;
        best.alternative = a;
        best.weights = std::move(wm.weights);
      }
    }
    return best;
  }
  const auto& vertices = amb.vertex_hull().vertices;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    const std::vector<double> col = LeftMultiply(p, vertices[v].margins);
    for (std::size_t a = 0; a < m; ++a) {
      if (col[a] < best.value) {
        best.value = col[a];
        best.alternative = a;
        best.vertex = v;
      }
    }
  }
  return best;
}

double InnerMinValue(std::span<const double> p, const AmbiguitySet& amb) {
  return InnerMin(p, amb).value;
}

double InnerMinValue(const Lottery& p, const AmbiguitySet& amb) {
  RequireSameRoster(p.roster, amb.roster(), "InnerMinValue");
  return InnerMinValue(p.probs, amb);
}

// ---------------------------------------------------------------------------
// Robust lottery

namespace {

RobustSolveReport SolveRobustLottery(const AmbiguitySet& amb,
                                     std::span<const LotteryConstraint> extra) {
  RobustLayout L = BuildRobustLp(amb, extra);
  const LinearProgram lp = L.builder.Build();
  const LpSolution sol = SolveLp(lp);
  if (sol.status == LpStatus::kInfeasible) {
    if (!extra.empty()) {
      throw InfeasibleError("RobustLottery: extra constraints admit no lottery");
    }
    throw SolverError("RobustLottery: solver reported INFEASIBLE\n" + DumpLp(lp));
  }
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError(std::string("RobustLottery: solver returned ") +
                      LpStatusName(sol.status) + "\n" + DumpLp(lp));
  }

  RobustSolveReport rep;
  const std::size_t m = L.m;
  rep.lottery.roster = amb.roster();
  rep.lottery.probs = CleanProbabilities(std::span(sol.point).first(m));
  rep.worst_case = InnerMin(rep.lottery.probs, amb);
  rep.lottery.value = rep.worst_case.value;
  rep.robust_value = sol.point[L.t];

  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    rep.rho = tv.radius;
    rep.center = tv.center.weights();
    rep.duals.mu.assign(sol.point.begin() + static_cast<long>(L.mu),
                        sol.point.begin() + static_cast<long>(L.mu + m));
    rep.duals.lambda.assign(sol.point.begin() + static_cast<long>(L.lambda),
                            sol.point.begin() + static_cast<long>(L.lambda + m));
    for (std::size_t a = 0; a < m; ++a) {
      const auto first = sol.point.begin() + static_cast<long>(L.gamma + a * L.k);
      rep.duals.gamma.emplace_back(first, first + static_cast<long>(L.k));
      double bound = rep.duals.mu[a] - 2.0 * tv.radius * rep.duals.lambda[a];
      for (std::size_t k = 0; k < L.k; ++k) bound += tv.center[k] * rep.duals.gamma[a][k];
      if (bound - rep.robust_value <= kActiveTol) rep.active_alternatives.push_back(a);
    }
  } else {
    std::vector<double> col_min(m, std::numeric_limits<double>::infinity());
    for (const MarginMatrix& v : amb.vertex_hull().vertices) {
      const std::vector<double> col = LeftMultiply(rep.lottery.probs, v.margins);
      for (std::size_t a = 0; a < m; ++a) col_min[a] = std::min(col_min[a], col[a]);
    }
    for (std::size_t a = 0; a < m; ++a) {
      if (col_min[a] - rep.robust_value <= kActiveTol) rep.active_alternatives.push_back(a);
    }
  }
  return rep;
}

std::vector<std::size_t> AmbiguityOrder(const AmbiguitySet& amb) {
  std::vector<const Matrix*> mats;
  if (amb.is_tv_ball()) {
    for (const auto& mk : amb.tv_ball().margins.per_group) mats.push_back(&mk.margins);
  } else {
    for (const auto& v : amb.vertex_hull().vertices) mats.push_back(&v.margins);
  }
  return internal::CanonicalOrder(mats);
}

AmbiguitySet PermuteAmbiguity(const AmbiguitySet& amb,
                              std::span<const std::size_t> order) {
  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    GroupMargins gm = tv.margins;
    gm.roster = internal::PermuteVector<std::string>(gm.roster, order);
    for (auto& mk : gm.per_group) mk = internal::PermuteMarginMatrix(mk, order);
    return AmbiguitySet::MakeTvBall(std::move(gm), tv.center, tv.radius);
  }
  std::vector<MarginMatrix> vertices;
  for (const auto& v : amb.vertex_hull().vertices) {
    vertices.push_back(internal::PermuteMarginMatrix(v, order));
  }
  return AmbiguitySet::MakeVertexHull(std::move(vertices));
}

std::vector<std::size_t> UnpermuteIndices(std::span<const std::size_t> idx,
                                          std::span<const std::size_t> order) {
  std::vector<std::size_t> out;
  for (std::size_t a : idx) out.push_back(order[a]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SolveRobustBipartisanSet(const AmbiguitySet& amb) {
  const double v_star = SolveRobustLottery(amb, {}).robust_value;
  // max p_i subject to t >= v* - slack.
  auto max_weight = [&](std::size_t i, double slack) {
    RobustLayout L = BuildRobustLp(amb, {});
    L.builder.SetObjective(L.t, 0.0);
    L.builder.SetObjective(i, 1.0);
    L.builder.AddGreaterEqual({{L.t, 1.0}}, v_star - slack);
    const LinearProgram lp = L.builder.Build();
    const LpSolution sol = SolveLp(lp);
    if (sol.status != LpStatus::kOptimal) {
      throw SolverError(std::string("RobustBipartisanSet: solver returned ") +
                        LpStatusName(sol.status) + "\n" + DumpLp(lp));
    }
    return sol.value;
  };
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < amb.num_models(); ++i) {
    const double relaxed = max_weight(i, kBipartisanSlack);
    if (relaxed <= kSupportEps) continue;
    // The optimum is concave and piecewise linear in the slack, so
    // 2 f(s) - f(2s) bounds f(0) from above and equals it unless a breakpoint
    // falls inside (0, 2s).
    const double at_zero = 2.0 * relaxed - max_weight(i, 2.0 * kBipartisanSlack);
    if (at_zero > kSupportEps) members.push_back(i);
  }
  return members;
}

}  // namespace

RobustSolveReport RobustLottery(const AmbiguitySet& amb,
                                std::span<const LotteryConstraint> extra) {
  const std::vector<std::size_t> order = AmbiguityOrder(amb);
  if (internal::IsIdentity(order)) return SolveRobustLottery(amb, extra);
  std::vector<LotteryConstraint> canon_extra;
  for (const LotteryConstraint& c : extra) {
    if (c.coeffs.size() != order.size()) {
      throw InputError("RobustLottery: extra constraint has wrong length");
    }
    canon_extra.push_back({internal::PermuteVector<double>(c.coeffs, order), c.rhs});
  }
  RobustSolveReport rep = SolveRobustLottery(PermuteAmbiguity(amb, order), canon_extra);
  rep.lottery.roster = amb.roster();
  rep.lottery.probs = internal::UnpermuteVector<double>(rep.lottery.probs, order);
  rep.active_alternatives = UnpermuteIndices(rep.active_alternatives, order);
  rep.worst_case.alternative = order[rep.worst_case.alternative];
  if (!rep.duals.mu.empty()) {
    rep.duals.mu = internal::UnpermuteVector<double>(rep.duals.mu, order);
    rep.duals.lambda = internal::UnpermuteVector<double>(rep.duals.lambda, order);
    rep.duals.gamma =
        internal::UnpermuteVector<std::vector<double>>(rep.duals.gamma, order);
  }
  return rep;
}

std::vector<std::size_t> RobustBipartisanSet(const AmbiguitySet& amb) {
  const std::vector<std::size_t> order = AmbiguityOrder(amb);
  if (internal::IsIdentity(order)) return SolveRobustBipartisanSet(amb);
  return UnpermuteIndices(SolveRobustBipartisanSet(PermuteAmbiguity(amb, order)), order);
}

// ---------------------------------------------------------------------------
// Axiomatic detectors

EntryRange MarginRange(const AmbiguitySet& amb, std::size_t i, std::size_t j) {
  const std::size_t m = amb.num_models();
  if (i >= m || j >= m) throw InputError("MarginRange: index out of range");
  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    std::vector<double> s, neg;
    for (const auto& mk : tv.margins.per_group) {
      s.push_back(mk.margins(i, j));
      neg.push_back(-mk.margins(i, j));
    }
    return {TvInnerMin(s, tv.center, tv.radius).value,
            -TvInnerMin(neg, tv.center, tv.radius).value};
  }
  EntryRange r{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  for (const auto& v : amb.vertex_hull().vertices) {
    r.min = std::min(r.min, v.margins(i, j));
    r.max = std::max(r.max, v.margins(i, j));
  }
  return r;
}

std::optional<std::size_t> RobustCondorcetWinner(const AmbiguitySet& amb,
                                                 bool strict) {
  const std::size_t m = amb.num_models();
  for (std::size_t i = 0; i < m; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < m && ok; ++j) {
      if (j == i) continue;
      const EntryRange r = MarginRange(amb, i, j);
      ok = r.min >= -kMarginTol && (!strict || r.max > kMarginTol);
    }
    if (ok) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> RobustDominated(const AmbiguitySet& amb) {
  const std::size_t m = amb.num_models();
  std::vector<std::size_t> dominated;
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t x = 0; x < m; ++x) {
      if (x == y) continue;
      double worst = std::numeric_limits<double>::infinity();
      if (amb.is_tv_ball()) {
        const TvBall& tv = amb.tv_ball();
        std::vector<double> diff(tv.margins.num_groups());
        for (std::size_t j = 0; j < m && worst > kMarginTol; ++j) {
          for (std::size_t k = 0; k < diff.size(); ++k) {
            const Matrix& mk = tv.margins.per_group[k].margins;
            diff[k] = mk(x, j) - mk(y, j);
          }
          worst = std::min(worst, TvInnerMin(diff, tv.center, tv.radius).value);
        }
      } else {
        worst = MinOverVertices(amb.vertex_hull(), [&](const Matrix& v) {
          double w = std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < m; ++j) w = std::min(w, v(x, j) - v(y, j));
          return w;
        });
      }
      if (worst > kMarginTol) {
        dominated.push_back(y);
        break;
      }
    }
  }
  return dominated;
}

// ---------------------------------------------------------------------------
// Finite-sample radius and sparsification

double RhoFromData(std::uint64_t n, std::size_t k, double delta) {
  if (n == 0 || k == 0) throw InputError("RhoFromData: n and K must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("RhoFromData: delta must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  const double r = std::sqrt(static_cast<double>(k) / nn) +
                   std::sqrt((2.0 / nn) * std::log(2.0 / delta));
  return std::min(1.0, r);
}

double RegretBound(std::uint64_t n, std::size_t k, double delta) {
  if (n == 0 || k == 0) throw InputError("RegretBound: n and K must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("RegretBound: delta must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  return 4.0 * std::sqrt(static_cast<double>(k) / nn) +
         4.0 * std::sqrt((2.0 / nn) * std::log(2.0 / delta));
}

std::size_t SparsifySampleSize(std::size_t m, std::size_t k, double eps,
                               double rho) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InputError("Sparsify: eps must lie in (0, 1]");
  const double md = static_cast<double>(m);
  const double mean_term = 8.0 / (eps * eps) * std::log(4.0 * md);
  const double range_term = 32.0 * rho * rho / (eps * eps) *
                            std::log(8.0 * md * static_cast<double>(k));
  return static_cast<std::size_t>(std::ceil(std::max(mean_term, range_term)));
}

SparsifyResult Sparsify(const Lottery& p_star, const AmbiguitySet& amb,
                        double eps, int trials, std::uint64_t seed) {
  const TvBall& tv = amb.tv_ball();
  if (tv.radius > SmallRadiusThreshold(tv.center)) {
    throw InputError("Sparsify: radius exceeds the small-radius threshold");
  }
  if (trials <= 0) throw InputError("Sparsify: trials must be positive");
  RequireSameRoster(p_star.roster, amb.roster(), "Sparsify");
  const std::size_t m = amb.num_models();
  SparsifyResult res;
  res.sample_size = SparsifySampleSize(m, tv.margins.num_groups(), eps, tv.radius);
  res.target = InnerMinValue(p_star, amb) - eps;

  std::vector<double> cumulative(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) cumulative[i] = (acc += p_star.probs[i]);

  double best = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, "sparsify", static_cast<std::uint64_t>(trial));
    std::vector<double> counts(m, 0.0);
    for (std::size_t s = 0; s < res.sample_size; ++s) {
      const double u = rng.Uniform01() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      std::size_t idx = std::min<std::size_t>(
          static_cast<std::size_t>(it - cumulative.begin()), m - 1);
      while (p_star.probs[idx] <= 0.0 && idx > 0) --idx;  // skip zero-mass ties
      counts[idx] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(res.sample_size);
    const double value = InnerMinValue(counts, amb);
    ++res.trials_run;
    if (value > best) {
      best = value;
      res.lottery = Lottery{amb.roster(), counts, value};
    }
  }
  if (best < res.target) {
    throw SolverError("Sparsify: best of " + std::to_string(trials) +
                      " trials reached " + FormatDouble(best) + ", target " +
                      FormatDouble(res.target));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Set constructions

AmbiguitySet MixtureAmbiguity(const AmbiguitySet& a, const AmbiguitySet& b,
                              double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InputError("MixtureAmbiguity: lambda must lie in [0, 1]");
  }
  const auto& va = a.vertex_hull().vertices;
  const auto& vb = b.vertex_hull().vertices;
  RequireSameRoster(a.roster(), b.roster(), "MixtureAmbiguity");
  const std::size_t m = a.num_models();
  std::vector<MarginMatrix> mixed;
  for (const auto& x : va) {
    for (const auto& y : vb) {
      MarginMatrix mm{a.roster(), Matrix(m, m, 0.0), Matrix(m, m, 0.0)};
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          mm.margins(i, j) = lambda * x.margins(i, j) + (1.0 - lambda) * y.margins(i, j);
        }
      }
      const bool dup = std::any_of(mixed.begin(), mixed.end(), [&](const MarginMatrix& z) {
        return z.margins == mm.margins;
      });
      if (!dup) mixed.push_back(std::move(mm));
    }
  }
  return AmbiguitySet::MakeVertexHull(std::move(mixed));
}

std::vector<MixtureWeights> TvBallVertices(const MixtureWeights& center,
                                           double radius) {
  if (!(radius >= 0.0)) throw InputError("TvBallVertices: negative radius");
  if (radius > SmallRadiusThreshold(center)) {
    throw InputError("vertex enumeration only for small radius");
  }
  std::vector<MixtureWeights> out{center};
  if (radius == 0.0) return out;
  const std::size_t k = center.size();
  for (std::size_t plus = 0; plus < k; ++plus) {
    for (std::size_t minus = 0; minus < k; ++minus) {
      if (plus == minus) continue;
      std::vector<double> w = center.weights();
      w[plus] -= radius;
      w[minus] += radius;
      out.emplace_back(std::move(w));
    }
  }
  return out;
}

AmbiguitySet ToVertexHull(const AmbiguitySet& tv_ball) {
  const TvBall& tv = tv_ball.tv_ball();
  std::vector<MarginMatrix> vertices;
  for (const auto& w : TvBallVertices(tv.center, tv.radius)) {
    vertices.push_back(PooledMatrix(tv.margins, w));
  }
  return AmbiguitySet::MakeVertexHull(std::move(vertices));
}

AmbiguityCloneExpansion ExpandClones(const AmbiguitySet& amb,
                                     std::size_t parent,
                                     std::span<const double> handicaps) {
  CloneMap map = MakeCloneMap(amb.roster(), parent, handicaps.size());
  auto expand = [&](const MarginMatrix& mm) {
    Matrix e = ExpandClonesMatrix(mm.margins, parent, handicaps);
    const std::size_t n = e.rows();
    return MarginMatrix{map.expanded_roster, std::move(e), Matrix(n, n, 0.0)};
  };
  if (amb.is_tv_ball()) {
    const TvBall& tv = amb.tv_ball();
    GroupMargins gm = tv.margins;
    gm.roster = map.expanded_roster;
    for (auto& mk : gm.per_group) mk = expand(mk);
    return {AmbiguitySet::MakeTvBall(std::move(gm), tv.center, tv.radius),
            std::move(map)};
  }
  std::vector<MarginMatrix> vertices;
  for (const auto& v : amb.vertex_hull().vertices) vertices.push_back(expand(v));
  return {AmbiguitySet::MakeVertexHull(std::move(vertices)), std::move(map)};
}

}  // namespace mlot
