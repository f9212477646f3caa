// Copyright 2026 The qcmsv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reproducible random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Stream seeds are derived with the SplitMix64 finalizer, so the
// stream for (seed, tag, index) never depends on how many other streams were
// drawn or in which order. Uniform and normal variates are produced here
// rather than through <random> distributions, whose algorithms are
// implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "qcmsv/types.hpp"

namespace qcmsv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Mixes a base seed with any number of stream coordinates.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ull));
  return h;
}

/// Stream tags keep unrelated consumers of one seed apart.
enum class StreamTag : std::uint64_t {
  Matrix = 1,
  HadamardRows = 2,
  CmsvStart = 3,
  BruteForce = 4,
  CcpStart = 5,
  RicSupport = 6,
  Signal = 7,
  Noise = 8,
  Experiment = 9,
  LpShift = 10,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0)
      : engine_(derive_seed(seed, {static_cast<std::uint64_t>(tag), index})) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_left() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t index(std::uint64_t n) {
    require(n > 0, ErrorCode::InvalidArgument, "index range must be positive");
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return r % n;
  }

  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller; each call consumes two engine outputs.
  double normal() {
    const double u1 = uniform_open_left();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gamma(shape, 1) by Marsaglia and Tsang, boosted by U^{1/shape} when
  /// shape < 1.
  double gamma(double shape) {
    require(shape > 0.0, ErrorCode::InvalidArgument, "gamma shape must be positive");
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open_left(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open_left();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// First `count` entries of a Fisher-Yates shuffle of 0..n-1. The prefix
  /// for a smaller count is a prefix of the one for a larger count.
  std::vector<Eigen::Index> partial_permutation(Eigen::Index n, Eigen::Index count) {
    require(count >= 0 && count <= n, ErrorCode::InvalidArgument,
            "permutation prefix longer than the range");
    std::vector<Eigen::Index> perm(n);
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto j = i + static_cast<Eigen::Index>(index(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[i], perm[j]);
    }
    perm.resize(count);
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qcmsv
