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

// Two-phase revised primal simplex for small dense LPs.
//
// The basis is kept as a sparse LU factorization with product-form updates
// and refactored periodically. Pricing takes the largest reduced cost and
// falls back to Bland's rule on long degenerate runs; the ratio test is
// Harris's two-pass rule. Rows are relaxed by a tiny fixed perturbation
// while iterating and restored at the end, after which dual simplex pivots
// recover exact feasibility. All choices break ties by index, so a given
// LinearProgram always yields the same LpSolution.

#ifndef MLOT_LP_H_
#define MLOT_LP_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlot/common.h"

namespace mlot {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// maximize objective . x
// s.t.     eq_matrix x   =  eq_rhs
//          ineq_matrix x <= ineq_rhs
//          lower <= x <= upper   (lower may be -inf, upper may be +inf)
struct LinearProgram {
  std::vector<double> objective;
  Matrix eq_matrix;
  std::vector<double> eq_rhs;
  Matrix ineq_matrix;
  std::vector<double> ineq_rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  // Optional; used only by DumpLp.
  std::vector<std::string> names;

  std::size_t num_variables() const { return objective.size(); }

  // Throws InputError on inconsistent dimensions, NaN or infinite
  // coefficients, or lower > upper.
  void Validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* LpStatusName(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> point;
  double value = 0.0;
  double max_primal_residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double feas_tol = kFeasTol;
  double pivot_tol = kPivotTol;
  int max_iterations = 2'000'000;
};

// Throws InputError if the program is malformed and SolverError if the
// iteration limit is hit. Infeasible/unbounded programs are reported through
// LpSolution::status.
LpSolution SolveLp(const LinearProgram& lp, const SolverOptions& options = {});

// Constraint violations of a point, each clamped at zero: a feasible point
// reports all zeros.
struct ResidualReport {
  double equality = 0.0;    // max |row . x - rhs|
  double inequality = 0.0;  // max (row . x - rhs)+
  double bounds = 0.0;      // max (lower - x)+, (x - upper)+
  double Max() const;
};

ResidualReport CheckSolution(const LinearProgram& lp,
                             std::span<const double> point);

// CPLEX-LP-style text rendering, for cross-checking with external solvers.
std::string DumpLp(const LinearProgram& lp);

// Incremental construction with sparse rows.
class LpBuilder {
 public:
  using Terms = std::vector<std::pair<std::size_t, double>>;

  std::size_t AddVariable(std::string name, double lower, double upper,
                          double objective = 0.0);
  void SetObjective(std::size_t var, double coefficient);
  void AddLessEqual(Terms terms, double rhs);
  void AddGreaterEqual(Terms terms, double rhs);
  void AddEqual(Terms terms, double rhs);

  std::size_t num_variables() const { return objective_.size(); }
  LinearProgram Build() const;

 private:
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::string> names_;
  std::vector<std::pair<Terms, double>> eq_rows_;
  std::vector<std::pair<Terms, double>> le_rows_;
};

}  // namespace mlot

#endif  // MLOT_LP_H_
