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

#ifndef MLOT_COMMON_H_
#define MLOT_COMMON_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlot {

// Default tolerances shared by every solve.
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kPivotTol = 1e-10;
// Probability mass above this threshold counts as support.
inline constexpr double kSupportEps = 1e-7;

// Bad user input: malformed files, out-of-range arguments, shape mismatches.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A constrained solve has an empty feasible set (e.g. a cost budget that no
// lottery can meet).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The LP solver did not certify an optimum where one must exist.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles. Small by construction (m <= a few
// hundred), so no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  static Matrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  // Appends a row; the first row fixes the column count.
  void AppendRow(std::span<const double> values);

  std::vector<std::vector<double>> ToRows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// x^T A  (row vector times matrix).
std::vector<double> LeftMultiply(std::span<const double> x, const Matrix& a);

double Dot(std::span<const double> a, std::span<const double> b);

// Formats a double with 17 significant digits.
std::string FormatDouble(double value);

}  // namespace mlot

#endif  // MLOT_COMMON_H_
