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

// Reproducible random streams. All randomness in the library derives from a
// user seed plus a stream name and an index, so split/bootstrap/regret/sparsify
// draws are individually reproducible. Only the engine (whose output sequence
// the standard fixes) is taken from <random>; the uniform mappings below are
// written out so results do not depend on the standard library vendor.

#ifndef MLOT_RNG_H_
#define MLOT_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mlot {

class Rng {
 public:
  // Substream `index` of the named stream under `seed`.
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
  std::uint64_t UniformInt(std::uint64_t bound);

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Index drawn from the (not necessarily normalized) nonnegative weights.
  std::size_t Categorical(std::span<const double> weights);

  // In-place Fisher-Yates.
  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mlot

#endif  // MLOT_RNG_H_
