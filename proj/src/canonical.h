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

// Label-independent ordering of alternatives. Solvers build their LPs in this
// order and map results back, so relabeling the roster yields the same LP
// bytes and therefore the same lottery, permuted. Alternatives whose keys
// coincide keep their input order.

#ifndef MLOT_SRC_CANONICAL_H_
#define MLOT_SRC_CANONICAL_H_

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mlot/common.h"
#include "mlot/prefdata.h"

namespace mlot::internal {

// order[a] = input index placed at canonical position a. The key of
// alternative i is the sorted list of its margin profiles
// (M^(1)_ij, ..., M^(K)_ij) over opponents j != i.
inline std::vector<std::size_t> CanonicalOrder(std::span<const Matrix* const> mats) {
  const std::size_t m = mats.empty() ? 0 : mats.front()->rows();
  std::vector<std::vector<std::vector<double>>> keys(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      std::vector<double> profile;
      profile.reserve(mats.size());
      for (const Matrix* mat : mats) profile.push_back((*mat)(i, j));
      keys[i].push_back(std::move(profile));
    }
    std::sort(keys[i].begin(), keys[i].end());
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

inline bool IsIdentity(std::span<const std::size_t> order) {
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (order[a] != a) return false;
  }
  return true;
}

// out(a, b) = m(order[a], order[b]).
inline Matrix PermuteSquare(const Matrix& m, std::span<const std::size_t> order) {
  Matrix out(order.size(), order.size(), 0.0);
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = 0; b < order.size(); ++b) out(a, b) = m(order[a], order[b]);
  }
  return out;
}

template <typename T>
std::vector<T> PermuteVector(std::span<const T> v, std::span<const std::size_t> order) {
  std::vector<T> out;
  out.reserve(order.size());
  for (std::size_t idx : order) out.push_back(v[idx]);
  return out;
}

// Inverse of PermuteVector: out[order[a]] = v[a].
template <typename T>
std::vector<T> UnpermuteVector(std::span<const T> v, std::span<const std::size_t> order) {
  std::vector<T> out(v.size());
  for (std::size_t a = 0; a < order.size(); ++a) out[order[a]] = v[a];
  return out;
}

inline MarginMatrix PermuteMarginMatrix(const MarginMatrix& m,
                                        std::span<const std::size_t> order) {
  return MarginMatrix{
      PermuteVector<std::string>(m.roster, order),
      PermuteSquare(m.margins, order),
      m.counts.rows() == m.size() ? PermuteSquare(m.counts, order) : m.counts};
}

}  // namespace mlot::internal

#endif  // MLOT_SRC_CANONICAL_H_
