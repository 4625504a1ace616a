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

#include "mlot/lp.h"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Core>
#include <Eigen/SparseLU>

namespace mlot {
namespace {

// Standard form: maximize c.y s.t. A y = b, y >= 0, with the original
// variables recovered as x = offset + sum(sign * y) over their columns.
struct StandardForm {
  Matrix a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> x_offset;
  // Per column: owning original variable and sign; slack columns have
  // var == npos.
  std::vector<std::size_t> col_var;
  std::vector<double> col_sign;
  // Rows whose slack (coefficient +1 before sign normalization) can serve
  // as an initial basic variable; npos if none.
  std::vector<std::size_t> row_slack;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

StandardForm ToStandardForm(const LinearProgram& lp) {
  const std::size_t n = lp.num_variables();
  StandardForm sf;
  sf.x_offset.assign(n, 0.0);

  // Structural columns.
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (column, bound)
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double up = lp.upper[j];
    if (std::isfinite(lo)) {
      sf.x_offset[j] = lo;
      sf.col_var.push_back(j);
      sf.col_sign.push_back(1.0);
      if (std::isfinite(up)) upper_rows.emplace_back(sf.col_var.size() - 1, up - lo);
    } else if (std::isfinite(up)) {
      sf.x_offset[j] = up;
      sf.col_var.push_back(j);
      sf.col_sign.push_back(-1.0);
    } else {
      sf.col_var.push_back(j);
      sf.col_sign.push_back(1.0);
      sf.col_var.push_back(j);
      sf.col_sign.push_back(-1.0);
    }
  }
  const std::size_t structural = sf.col_var.size();
  const std::size_t num_eq = lp.eq_rhs.size();
  const std::size_t num_le = lp.ineq_rhs.size() + upper_rows.size();
  const std::size_t rows = num_eq + num_le;
  const std::size_t cols = structural + num_le;

  sf.a = Matrix(rows, cols, 0.0);
  sf.b.assign(rows, 0.0);
  sf.row_slack.assign(rows, kNone);

  auto fill_row = [&](std::size_t r, std::span<const double> coeffs,
                      double rhs) {
    double shifted = rhs;
    for (std::size_t k = 0; k < structural; ++k) {
      const double coef = coeffs[sf.col_var[k]];
      if (coef == 0.0) continue;
      sf.a(r, k) = coef * sf.col_sign[k];
    }
    for (std::size_t j = 0; j < n; ++j) shifted -= coeffs[j] * sf.x_offset[j];
    sf.b[r] = shifted;
  };

  std::size_t r = 0;
  for (std::size_t i = 0; i < num_eq; ++i, ++r) {
    fill_row(r, lp.eq_matrix.row(i), lp.eq_rhs[i]);
  }
  std::size_t slack = structural;
  for (std::size_t i = 0; i < lp.ineq_rhs.size(); ++i, ++r, ++slack) {
    fill_row(r, lp.ineq_matrix.row(i), lp.ineq_rhs[i]);
    sf.a(r, slack) = 1.0;
    sf.row_slack[r] = slack;
  }
  for (const auto& [col, bound] : upper_rows) {
    sf.a(r, col) = 1.0;
    sf.b[r] = bound;
    sf.a(r, slack) = 1.0;
    sf.row_slack[r] = slack;
    ++r;
    ++slack;
  }

  sf.c.assign(cols, 0.0);
  for (std::size_t k = 0; k < structural; ++k) {
    sf.c[k] = lp.objective[sf.col_var[k]] * sf.col_sign[k];
  }
  sf.col_var.resize(cols, kNone);
  sf.col_sign.resize(cols, 0.0);
  return sf;
}

using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseColumn = std::vector<std::pair<std::size_t, double>>;

// Revised primal simplex on the standard form, with the basis held as a
// sparse LU factorization plus a product-form eta file.
class Simplex {
 public:
  Simplex(const StandardForm& sf, const SolverOptions& options)
      : opt_(options), rows_(sf.a.rows()), cols_(sf.a.cols()) {
    std::vector<double> sign(rows_);
    original_rhs_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      sign[r] = sf.b[r] < 0.0 ? -1.0 : 1.0;
      original_rhs_[r] = sign[r] * sf.b[r];
    }
    columns_.resize(cols_);
    for (std::size_t j = 0; j < cols_; ++j) {
      for (std::size_t r = 0; r < rows_; ++r) {
        if (sf.a(r, j) != 0.0) columns_[j].emplace_back(r, sign[r] * sf.a(r, j));
      }
    }
    // Slack basis where possible, artificials elsewhere.
    basis_.assign(rows_, kNone);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (sf.row_slack[r] != kNone && sign[r] > 0.0) {
        basis_[r] = sf.row_slack[r];
      } else {
        basis_[r] = columns_.size();
        columns_.push_back({{r, 1.0}});
      }
    }
    position_.assign(columns_.size(), kNone);
    for (std::size_t r = 0; r < rows_; ++r) position_[basis_[r]] = r;

    phase2_cost_.assign(columns_.size(), 0.0);
    std::copy(sf.c.begin(), sf.c.end(), phase2_cost_.begin());
    phase1_cost_.assign(columns_.size(), 0.0);
    for (std::size_t j = cols_; j < columns_.size(); ++j) phase1_cost_[j] = -1.0;

    // Relax every row whose slack starts basic by a small deterministic
    // amount. The perturbed problem is (generically) nondegenerate; the
    // relaxation is undone before the final cleanup.
    rhs_ = original_rhs_;
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (std::size_t r = 0; r < rows_; ++r) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      if (basis_[r] >= cols_) continue;
      const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
      rhs_[r] += kPerturbation * (1.0 + u);
    }
  }

  LpStatus Run() {
    Refactor();
    if (columns_.size() > cols_) {
      Optimize(phase1_cost_);  // bounded above by zero
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (basis_[r] >= cols_) infeasibility += std::max(0.0, x_[r]);
      }
      if (infeasibility > opt_.feas_tol) return LpStatus::kInfeasible;
      artificials_fixed_ = true;
      DriveOutArtificials();
    }
    if (Optimize(phase2_cost_) == LpStatus::kUnbounded) return LpStatus::kUnbounded;
    if (!RestoreRhs()) return LpStatus::kInfeasible;
    return Optimize(phase2_cost_);
  }

  // Basic point in standard-form coordinates (valid after Run() returned
  // OPTIMAL, which leaves a freshly factored basis).
  std::vector<double> Point() const {
    std::vector<double> y(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) y[basis_[r]] = std::max(0.0, x_[r]);
    }
    return y;
  }

  int iterations() const { return iterations_; }

 private:
  // Eta vectors accumulated before the basis is refactored.
  static constexpr std::size_t kRefactorPeriod = 64;
  // Pivot elements below this size trigger a refactorization before use.
  static constexpr double kSmallPivot = 1e-7;
  // Consecutive non-improving pivots before switching to Bland's rule.
  static constexpr int kDegenerateRun = 50;
  // Scale of the rhs relaxation used against degeneracy.
  static constexpr double kPerturbation = 1e-7;

  struct Eta {
    std::size_t row;
    double pivot;
    SparseColumn column;  // entries other than the pivot
  };

  bool IsArtificial(std::size_t j) const { return j >= cols_; }

  // Factors the basis, clears the eta file and recomputes x_B from rhs_.
  void Refactor() {
    const auto n = static_cast<Eigen::Index>(rows_);
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t k = 0; k < rows_; ++k) {
      for (const auto& [r, v] : columns_[basis_[k]]) {
        entries.emplace_back(static_cast<Eigen::Index>(r),
                             static_cast<Eigen::Index>(k), v);
      }
    }
    SparseMatrix b(n, n);
    b.setFromTriplets(entries.begin(), entries.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() != Eigen::Success) {
      throw SolverError("SolveLp: basis matrix became singular");
    }
    etas_.clear();
    Eigen::VectorXd rhs(n);
    for (std::size_t r = 0; r < rows_; ++r) rhs[static_cast<Eigen::Index>(r)] = rhs_[r];
    const Eigen::VectorXd x = lu_.solve(rhs);
    x_.assign(x.data(), x.data() + x.size());
  }

  // B^-1 a_j.
  std::vector<double> Ftran(std::size_t j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_));
    for (const auto& [r, v] : columns_[j]) a[static_cast<Eigen::Index>(r)] = v;
    const Eigen::VectorXd solved = lu_.solve(a);
    std::vector<double> x(solved.data(), solved.data() + solved.size());
    for (const Eta& eta : etas_) {
      const double xr = x[eta.row] / eta.pivot;
      x[eta.row] = xr;
      if (xr == 0.0) continue;
      for (const auto& [i, v] : eta.column) x[i] -= v * xr;
    }
    return x;
  }

  // c^T B^-1.
  std::vector<double> Btran(std::vector<double> z) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = z[it->row];
      for (const auto& [i, v] : it->column) acc -= z[i] * v;
      z[it->row] = acc / it->pivot;
    }
    const Eigen::Map<const Eigen::VectorXd> zm(z.data(), static_cast<Eigen::Index>(z.size()));
    const Eigen::VectorXd y = lu_.transpose().solve(zm);
    return {y.data(), y.data() + y.size()};
  }

  double ColumnDot(std::size_t j, const std::vector<double>& y) const {
    double acc = 0.0;
    for (const auto& [r, v] : columns_[j]) acc += y[r] * v;
    return acc;
  }

  std::vector<double> Duals(const std::vector<double>& cost) const {
    std::vector<double> cb(rows_);
    for (std::size_t r = 0; r < rows_; ++r) cb[r] = cost[basis_[r]];
    return Btran(std::move(cb));
  }

  // Replaces the basic variable at `row` by column `enter`, whose Ftran is
  // `alpha`, moving the basic solution by step `theta`.
  void Pivot(std::size_t row, std::size_t enter, const std::vector<double>& alpha,
             double theta) {
    Eta eta{row, alpha[row], {}};
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row || alpha[i] == 0.0) continue;
      eta.column.emplace_back(i, alpha[i]);
      x_[i] -= theta * alpha[i];
    }
    x_[row] = theta;
    position_[basis_[row]] = kNone;
    basis_[row] = enter;
    position_[enter] = row;
    etas_.push_back(std::move(eta));
    if (++iterations_ > opt_.max_iterations) {
      throw SolverError("SolveLp: iteration limit exceeded");
    }
  }

  // Largest reduced cost enters (lowest index on ties). After
  // kDegenerateRun consecutive pivots without objective progress the rule
  // switches to Bland's (lowest eligible index) until the objective strictly
  // improves, which rules out cycling. Optimality and unboundedness are only
  // declared on a freshly factored basis. Artificial columns never enter.
  LpStatus Optimize(const std::vector<double>& cost) {
    int stalled = 0;
    bool fresh = etas_.empty();
    for (;;) {
      if (etas_.size() >= kRefactorPeriod) {
        Refactor();
        fresh = true;
      }
      const bool bland = stalled >= kDegenerateRun;
      const std::vector<double> y = Duals(cost);
      std::size_t enter = kNone;
      double best_d = opt_.pivot_tol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (position_[j] != kNone) continue;
        const double d = cost[j] - ColumnDot(j, y);
        if (d > best_d) {
          enter = j;
          if (bland) break;
          best_d = d;
        }
      }
      if (enter == kNone) {
        if (!fresh) {
          Refactor();
          fresh = true;
          continue;
        }
        return LpStatus::kOptimal;
      }
      const std::vector<double> alpha = Ftran(enter);
      const std::size_t leave = bland ? BlandRatio(alpha) : HarrisRatio(alpha);
      if (leave == kNone) {
        if (!fresh) {
          Refactor();
          fresh = true;
          continue;
        }
        return LpStatus::kUnbounded;
      }
      if (!fresh && std::abs(alpha[leave]) < kSmallPivot) {
        Refactor();
        fresh = true;
        continue;
      }
      const double theta = StepLength(leave, alpha);
      Pivot(leave, enter, alpha, theta);
      fresh = false;
      stalled = theta > 0.0 ? 0 : stalled + 1;
    }
  }

  bool Blocks(std::size_t i, double a) const {
    if (artificials_fixed_ && IsArtificial(basis_[i])) return std::abs(a) > opt_.pivot_tol;
    return a > opt_.pivot_tol;
  }

  double Ratio(std::size_t i, double a) const {
    if (artificials_fixed_ && IsArtificial(basis_[i])) return 0.0;
    return std::max(0.0, x_[i]) / a;
  }

  double StepLength(std::size_t leave, const std::vector<double>& alpha) const {
    return Ratio(leave, alpha[leave]);
  }

  // Textbook minimum-ratio test; ties go to the lowest basic index.
  std::size_t BlandRatio(const std::vector<double>& alpha) const {
    std::size_t leave = kNone;
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!Blocks(i, alpha[i])) continue;
      const double ratio = Ratio(i, alpha[i]);
      if (leave == kNone || ratio < best ||
          (ratio == best && basis_[i] < basis_[leave])) {
        leave = i;
        best = ratio;
      }
    }
    return leave;
  }

  // Two-pass Harris test: bound the step with values relaxed by feas_tol,
  // then take the largest pivot element among rows within that bound.
  std::size_t HarrisRatio(const std::vector<double>& alpha) const {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!Blocks(i, alpha[i])) continue;
      const double a = std::abs(alpha[i]);
      bound = std::min(bound, Ratio(i, alpha[i]) + opt_.feas_tol / a);
    }
    std::size_t leave = kNone;
    double best_a = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!Blocks(i, alpha[i])) continue;
      const double a = std::abs(alpha[i]);
      if (Ratio(i, alpha[i]) <= bound && a > best_a) {
        leave = i;
        best_a = a;
      }
    }
    return leave;
  }

  // Pivots basic artificials (all at zero level) out on their largest
  // structural entry; rows with none are redundant and keep the artificial,
  // which is then pinned at zero.
  void DriveOutArtificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (!IsArtificial(basis_[r])) continue;
      std::vector<double> unit(rows_, 0.0);
      unit[r] = 1.0;
      const std::vector<double> rho = Btran(std::move(unit));
      std::size_t col = kNone;
      double best = opt_.pivot_tol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (position_[j] != kNone) continue;
        const double a = std::abs(ColumnDot(j, rho));
        if (a > best) {
          col = j;
          best = a;
        }
      }
      if (col == kNone) continue;
      const std::vector<double> alpha = Ftran(col);
      Pivot(r, col, alpha, x_[r] / alpha[r]);
      if (etas_.size() >= kRefactorPeriod) Refactor();
    }
  }

  // Puts the original rhs back and recovers primal feasibility with dual
  // simplex pivots (the basis stays dual feasible). Returns false if the
  // original problem is infeasible.
  bool RestoreRhs() {
    rhs_ = original_rhs_;
    Refactor();
    bool fresh = true;
    for (;;) {
      if (etas_.size() >= kRefactorPeriod) {
        Refactor();
        fresh = true;
      }
      std::size_t leave = kNone;
      double worst = -opt_.feas_tol;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!IsArtificial(basis_[r]) && x_[r] < worst) {
          leave = r;
          worst = x_[r];
        }
      }
      if (leave == kNone) {
        if (!fresh) {
          Refactor();
          fresh = true;
          continue;
        }
        return true;
      }
      const std::vector<double> y = Duals(phase2_cost_);
      std::vector<double> unit(rows_, 0.0);
      unit[leave] = 1.0;
      const std::vector<double> rho = Btran(std::move(unit));
      std::size_t enter = kNone;
      double best = 0.0;
      double best_a = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (position_[j] != kNone) continue;
        const double a = ColumnDot(j, rho);
        if (a >= -opt_.pivot_tol) continue;
        const double ratio = std::min(0.0, phase2_cost_[j] - ColumnDot(j, y)) / a;
        if (enter == kNone || ratio < best || (ratio == best && -a > best_a)) {
          enter = j;
          best = ratio;
          best_a = -a;
        }
      }
      if (enter == kNone) {
        if (!fresh) {
          Refactor();
          fresh = true;
          continue;
        }
        return false;
      }
      const std::vector<double> alpha = Ftran(enter);
      Pivot(leave, enter, alpha, x_[leave] / alpha[leave]);
      fresh = false;
    }
  }

  SolverOptions opt_;
  std::size_t rows_;
  std::size_t cols_;  // structural + slack; artificials follow
  std::vector<SparseColumn> columns_;
  std::vector<double> phase1_cost_;
  std::vector<double> phase2_cost_;
  std::vector<double> original_rhs_;
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> position_;
  std::vector<double> x_;
  mutable Eigen::SparseLU<SparseMatrix> lu_;  // transpose() is non-const
  std::vector<Eta> etas_;
  bool artificials_fixed_ = false;
  int iterations_ = 0;
};

void CheckFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InputError(std::string("LinearProgram: non-finite ") + what);
  }
}

std::string VarName(const LinearProgram& lp, std::size_t j) {
  if (j < lp.names.size() && !lp.names[j].empty()) return lp.names[j];
  return "x" + std::to_string(j);
}

void DumpRow(std::ostringstream& out, const LinearProgram& lp,
             std::span<const double> row) {
  bool first = true;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == 0.0) continue;
    out << (row[j] < 0 ? " - " : (first ? " " : " + "))
        << FormatDouble(std::abs(row[j])) << " " << VarName(lp, j);
    first = false;
  }
  if (first) out << " 0 " << VarName(lp, 0);
}

}  // namespace

void LinearProgram::Validate() const {
  const std::size_t n = num_variables();
  if (lower.size() != n || upper.size() != n) {
    throw InputError("LinearProgram: bounds length does not match objective");
  }
  if (eq_matrix.rows() != eq_rhs.size() ||
      (eq_matrix.rows() > 0 && eq_matrix.cols() != n)) {
    throw InputError("LinearProgram: equality block has inconsistent shape");
  }
  if (ineq_matrix.rows() != ineq_rhs.size() ||
      (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n)) {
    throw InputError("LinearProgram: inequality block has inconsistent shape");
  }
  for (double v : objective) CheckFinite(v, "objective coefficient");
  for (double v : eq_matrix.data()) CheckFinite(v, "equality coefficient");
  for (double v : eq_rhs) CheckFinite(v, "equality rhs");
  for (double v : ineq_matrix.data()) CheckFinite(v, "inequality coefficient");
  for (double v : ineq_rhs) CheckFinite(v, "inequality rhs");
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf ||
        upper[j] == -kInf || lower[j] > upper[j]) {
      throw InputError("LinearProgram: invalid bounds on variable " +
                       std::to_string(j));
    }
  }
}

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "OPTIMAL";
    case LpStatus::kInfeasible:
      return "INFEASIBLE";
    case LpStatus::kUnbounded:
      return "UNBOUNDED";
  }
  return "?";
}

LpSolution SolveLp(const LinearProgram& lp, const SolverOptions& options) {
  lp.Validate();
  const StandardForm sf = ToStandardForm(lp);
  Simplex simplex(sf, options);
  LpSolution sol;
  sol.status = simplex.Run();
  sol.iterations = simplex.iterations();
  if (sol.status != LpStatus::kOptimal) return sol;

  const std::vector<double> y = simplex.Point();
  sol.point = sf.x_offset;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (sf.col_var[k] == kNone || y[k] == 0.0) continue;
    sol.point[sf.col_var[k]] += sf.col_sign[k] * y[k];
  }
  sol.value = Dot(lp.objective, sol.point);
  sol.max_primal_residual = CheckSolution(lp, sol.point).Max();
  return sol;
}

double ResidualReport::Max() const {
  return std::max({equality, inequality, bounds});
}

ResidualReport CheckSolution(const LinearProgram& lp,
                             std::span<const double> point) {
  if (point.size() != lp.num_variables()) {
    throw InputError("CheckSolution: point has wrong dimension");
  }
  ResidualReport rep;
  for (std::size_t i = 0; i < lp.eq_rhs.size(); ++i) {
    rep.equality = std::max(
        rep.equality, std::abs(Dot(lp.eq_matrix.row(i), point) - lp.eq_rhs[i]));
  }
  for (std::size_t i = 0; i < lp.ineq_rhs.size(); ++i) {
    rep.inequality = std::max(
        rep.inequality, Dot(lp.ineq_matrix.row(i), point) - lp.ineq_rhs[i]);
  }
  for (std::size_t j = 0; j < point.size(); ++j) {
    rep.bounds = std::max({rep.bounds, lp.lower[j] - point[j],
                           point[j] - lp.upper[j]});
  }
  return rep;
}

std::string DumpLp(const LinearProgram& lp) {
  std::ostringstream out;
  out << "\\ mlot linear program: " << lp.num_variables() << " variables, "
      << lp.eq_rhs.size() << " equalities, " << lp.ineq_rhs.size()
      << " inequalities\n";
  out << "Maximize\n obj:";
  DumpRow(out, lp, lp.objective);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.eq_rhs.size(); ++i) {
    out << " e" << i << ":";
    DumpRow(out, lp, lp.eq_matrix.row(i));
    out << " = " << FormatDouble(lp.eq_rhs[i]) << "\n";
  }
  for (std::size_t i = 0; i < lp.ineq_rhs.size(); ++i) {
    out << " c" << i << ":";
    DumpRow(out, lp, lp.ineq_matrix.row(i));
    out << " <= " << FormatDouble(lp.ineq_rhs[i]) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_variables(); ++j) {
    const bool lo_inf = std::isinf(lp.lower[j]);
    const bool up_inf = std::isinf(lp.upper[j]);
    out << " ";
    if (lo_inf && up_inf) {
      out << VarName(lp, j) << " free";
    } else {
      out << (lo_inf ? "-inf" : FormatDouble(lp.lower[j])) << " <= "
          << VarName(lp, j) << " <= "
          << (up_inf ? "+inf" : FormatDouble(lp.upper[j]));
    }
    out << "\n";
  }
  out << "End\n";
  return out.str();
}

std::size_t LpBuilder::AddVariable(std::string name, double lower,
                                   double upper, double objective) {
  objective_.push_back(objective);
  lower_.push_back(lower);
  upper_.push_back(upper);
  names_.push_back(std::move(name));
  return objective_.size() - 1;
}

void LpBuilder::SetObjective(std::size_t var, double coefficient) {
  objective_.at(var) = coefficient;
}

void LpBuilder::AddLessEqual(Terms terms, double rhs) {
  le_rows_.emplace_back(std::move(terms), rhs);
}

void LpBuilder::AddGreaterEqual(Terms terms, double rhs) {
  for (auto& t : terms) t.second = -t.second;
  le_rows_.emplace_back(std::move(terms), -rhs);
}

void LpBuilder::AddEqual(Terms terms, double rhs) {
  eq_rows_.emplace_back(std::move(terms), rhs);
}

LinearProgram LpBuilder::Build() const {
  const std::size_t n = objective_.size();
  LinearProgram lp;
  lp.objective = objective_;
  lp.lower = lower_;
  lp.upper = upper_;
  lp.names = names_;
  auto densify = [n](const Terms& terms) {
    std::vector<double> row(n, 0.0);
    for (const auto& [var, coef] : terms) {
      if (var >= n) throw InputError("LpBuilder: term references unknown variable");
      row[var] += coef;
    }
    return row;
  };
  lp.eq_matrix = Matrix(0, n);
  lp.ineq_matrix = Matrix(0, n);
  for (const auto& [terms, rhs] : eq_rows_) {
    lp.eq_matrix.AppendRow(densify(terms));
    lp.eq_rhs.push_back(rhs);
  }
  for (const auto& [terms, rhs] : le_rows_) {
    lp.ineq_matrix.AppendRow(densify(terms));
    lp.ineq_rhs.push_back(rhs);
  }
  return lp;
}

}  // namespace mlot
