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

// Small hand-written margin matrices shared by several test binaries.

#ifndef MLOT_TESTS_FIXTURES_H_
#define MLOT_TESTS_FIXTURES_H_

#include <string>
#include <vector>

#include "mlot/common.h"
#include "mlot/prefdata.h"

namespace mlot::testing {

inline const std::vector<std::string>& ThreeRoster() {
  static const std::vector<std::string> r{"1", "2", "3"};
  return r;
}

// Model 1 beats both others, model 2 beats model 3, all by 0.6.
inline Matrix EnMatrix() {
  return Matrix::FromRows({{0, 0.6, 0.6}, {-0.6, 0, 0.6}, {-0.6, -0.6, 0}});
}

// Equal-margin 3-cycle 1 > 2 > 3 > 1.
inline Matrix EsMatrix() {
  return Matrix::FromRows({{0, 0.6, -0.6}, {-0.6, 0, 0.6}, {0.6, -0.6, 0}});
}

inline GroupMargins EnEsMargins() {
  return MakeGroupMargins(ThreeRoster(), {"EN", "ES"}, {EnMatrix(), EsMatrix()});
}

// Three matrices whose hulls conv{A, B} and conv{A, C} share the robust
// lottery (0, 1/2, 1/2) while their even Minkowski mix does not.
inline Matrix MatA() {
  return Matrix::FromRows({{0, -1, -1}, {1, 0, -1}, {1, 1, 0}});
}
inline Matrix MatB() {
  return Matrix::FromRows({{0, -1, -1}, {1, 0, 1}, {1, -1, 0}});
}
inline Matrix MatC() {
  return Matrix::FromRows({{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}});
}

// Appends alternative m+1 that scores d worse than `src` against everyone,
// including -d against `src` itself.
inline Matrix ExpandedWithShiftedCopy(const Matrix& base, std::size_t src, double d) {
  const std::size_t m = base.rows();
  Matrix out(m + 1, m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out(i, j) = base(i, j);
  }
  for (std::size_t x = 0; x < m; ++x) {
    out(m, x) = (x == src ? 0.0 : base(src, x)) - d;
    out(x, m) = -out(m, x);
  }
  return out;
}

inline MarginMatrix Mm(const Matrix& m) {
  std::vector<std::string> roster;
  for (std::size_t i = 0; i < m.rows(); ++i) roster.push_back(std::to_string(i + 1));
  return MakeMarginMatrix(std::move(roster), m);
}

}  // namespace mlot::testing

#endif  // MLOT_TESTS_FIXTURES_H_
