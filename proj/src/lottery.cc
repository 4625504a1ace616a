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
#include <limits>

#include "canonical.h"
#include "mlot/lp.h"

namespace mlot {
namespace {

constexpr double kZeroProb = 1e-12;

// Variables p_0..p_{m-1}; sum(p) = 1.
void AddSimplex(LpBuilder& b, std::size_t m) {
  LpBuilder::Terms sum;
  for (std::size_t i = 0; i < m; ++i) {
    sum.emplace_back(b.AddVariable("p_" + std::to_string(i), 0.0, kInf), 1.0);
  }
  b.AddEqual(std::move(sum), 1.0);
}

// sum_i p_i M_ij - coef_t * t >= rhs for every column j.
void AddColumnGuarantees(LpBuilder& b, const Matrix& m, std::size_t t_var,
                         double rhs) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    LpBuilder::Terms row;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0.0) row.emplace_back(i, m(i, j));
    }
    if (t_var != static_cast<std::size_t>(-1)) row.emplace_back(t_var, -1.0);
    b.AddGreaterEqual(std::move(row), rhs);
  }
}

}  // namespace

std::vector<std::size_t> Lottery::Support(double eps) const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > eps) s.push_back(i);
  }
  return s;
}

std::vector<double> CleanProbabilities(std::span<const double> probs) {
  std::vector<double> out(probs.begin(), probs.end());
  double sum = 0.0;
  for (double& p : out) {
    if (p < kZeroProb) p = 0.0;
    sum += p;
  }
  if (!(sum > 0.0)) throw SolverError("CleanProbabilities: no mass left");
  if (sum != 1.0) {
    for (double& p : out) p /= sum;
  }
  return out;
}

double GuaranteeValue(std::span<const double> p, const Matrix& m) {
  const std::vector<double> col = LeftMultiply(p, m);
  return *std::min_element(col.begin(), col.end());
}

namespace {

Lottery SolveMaximalLottery(const MarginMatrix& m) {
  const std::size_t n = m.size();
  LpBuilder b;
  AddSimplex(b, n);
  const std::size_t t = b.AddVariable("t", -kInf, kInf, 1.0);
  AddColumnGuarantees(b, m.margins, t, 0.0);
  const LinearProgram lp = b.Build();
  const LpSolution sol = SolveLp(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverError(std::string("MaximalLottery: solver returned ") +
                      LpStatusName(sol.status) + "\n" + DumpLp(lp));
  }
  Lottery out;
  out.roster = m.roster;
  out.probs = CleanProbabilities(std::span(sol.point).first(n));
  out.value = GuaranteeValue(out.probs, m.margins);
  return out;
}

}  // namespace

Lottery MaximalLottery(const MarginMatrix& m) {
  m.Validate();
  if (m.size() == 0) throw InputError("MaximalLottery: empty roster");
  const Matrix* mats[] = {&m.margins};
  const std::vector<std::size_t> order = internal::CanonicalOrder(mats);
  if (internal::IsIdentity(order)) return SolveMaximalLottery(m);
  const MarginMatrix canon = internal::PermuteMarginMatrix(m, order);
  Lottery solved = SolveMaximalLottery(canon);
  solved.roster = m.roster;
  solved.probs = internal::UnpermuteVector<double>(solved.probs, order);
  return solved;
}

std::optional<std::size_t> CondorcetWinner(const MarginMatrix& m, bool strict) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool wins = true;
    for (std::size_t j = 0; j < m.size() && wins; ++j) {
      if (j == i) continue;
      wins = strict ? m.margins(i, j) > 0.0 : m.margins(i, j) >= 0.0;
    }
    if (wins) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> BipartisanSet(const MarginMatrix& m) {
  m.Validate();
  const std::size_t n = m.size();
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < n; ++i) {
    // The game value is 0, so ML(M) = {p : p^T M e_j >= 0 for all j}. Retry
    // with a feas_tol slack only if round-off makes the exact system appear
    // empty.
    double best = -1.0;
    for (double rhs : {0.0, -kFeasTol}) {
      LpBuilder b;
      AddSimplex(b, n);
      b.SetObjective(i, 1.0);
      AddColumnGuarantees(b, m.margins, static_cast<std::size_t>(-1), rhs);
      const LinearProgram lp = b.Build();
      const LpSolution sol = SolveLp(lp);
      if (sol.status == LpStatus::kOptimal) {
        best = sol.value;
        break;
      }
      if (rhs != 0.0) {
        throw SolverError("BipartisanSet: maximal-lottery polytope is empty\n" +
                          DumpLp(lp));
      }
    }
    if (best > kSupportEps) members.push_back(i);
  }
  return members;
}

Matrix ExpandClonesMatrix(const Matrix& m, std::size_t parent,
                          std::span<const double> handicaps) {
  const std::size_t n = m.rows();
  if (parent >= n) throw InputError("ExpandClones: parent index out of range");
  if (handicaps.empty()) throw InputError("ExpandClones: need at least one clone");
  const std::size_t total = n + handicaps.size();
  Matrix out(total, total, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) out(a, b) = m(a, b);
  }
  auto set = [&](std::size_t r, std::size_t c, double v) {
    if (!(std::abs(v) <= 1.0)) {
      throw InputError("ExpandClones: clone margin " + FormatDouble(v) +
                       " leaves [-1, 1]; shrink the handicap");
    }
    out(r, c) = v;
    out(c, r) = -v;
  };
  for (std::size_t c = 0; c < handicaps.size(); ++c) {
    const double h = handicaps[c];
    if (!(h >= 0.0)) throw InputError("ExpandClones: handicaps must be nonnegative");
    const std::size_t row = n + c;
    for (std::size_t x = 0; x < n; ++x) {
      set(row, x, x == parent ? -h : m(parent, x) - h);
    }
    for (std::size_t c2 = c + 1; c2 < handicaps.size(); ++c2) {
      set(row, n + c2, handicaps[c2] - h);
    }
  }
  return out;
}

CloneMap MakeCloneMap(const std::vector<std::string>& roster,
                      std::size_t parent, std::size_t num_clones) {
  if (parent >= roster.size()) throw InputError("ExpandClones: parent index out of range");
  CloneMap map;
  map.original_roster = roster;
  map.expanded_roster = roster;
  for (const auto& id : roster) map.parent[id] = id;
  for (std::size_t c = 0; c < num_clones; ++c) {
    std::string id = roster[parent] + "#clone" + std::to_string(c + 1);
    if (map.parent.count(id)) throw InputError("ExpandClones: clone id '" + id + "' already in roster");
    map.expanded_roster.push_back(id);
    map.parent[id] = roster[parent];
  }
  return map;
}

CloneExpansion ExpandClones(const MarginMatrix& m, std::size_t parent,
                            std::span<const double> handicaps) {
  m.Validate();
  CloneExpansion out;
  out.map = MakeCloneMap(m.roster, parent, handicaps.size());
  const Matrix expanded = ExpandClonesMatrix(m.margins, parent, handicaps);
  const std::size_t total = expanded.rows();
  out.matrix = MarginMatrix{out.map.expanded_roster, expanded,
                            Matrix(total, total, 0.0)};
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) out.matrix.counts(a, b) = m.counts(a, b);
  }
  out.matrix.Validate();
  return out;
}

Lottery ProjectLottery(const Lottery& expanded, const CloneMap& map) {
  if (expanded.roster != map.expanded_roster ||
      expanded.probs.size() != map.expanded_roster.size()) {
    throw InputError("ProjectLottery: lottery roster does not match clone map");
  }
  Lottery out;
  out.roster = map.original_roster;
  out.probs.assign(out.roster.size(), 0.0);
  out.value = expanded.value;
  for (std::size_t e = 0; e < expanded.roster.size(); ++e) {
    const std::string& parent = map.parent.at(expanded.roster[e]);
    const auto it = std::find(out.roster.begin(), out.roster.end(), parent);
    out.probs[static_cast<std::size_t>(it - out.roster.begin())] += expanded.probs[e];
  }
  return out;
}

}  // namespace mlot
