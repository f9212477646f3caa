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

// Random measurement ensembles. Entries are drawn row by row from the
// Matrix stream of the seed (std::mt19937_64 keyed by SplitMix64, see
// random.hpp), so output is identical on every platform with IEEE doubles.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "qcmsv/random.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

struct EnsembleSpec {
  EnsembleTag kind = EnsembleTag::Gaussian;
  Eigen::Index m = 1;
  Eigen::Index n = 1;
  std::uint64_t seed = 0;
  /// Entry scale for Gaussian/Bernoulli; defaults to 1/sqrt(m).
  std::optional<double> scale{};
  /// Seed of the Hadamard row shuffle; defaults to `seed`.
  std::optional<std::uint64_t> row_permutation_seed{};
  bool normalize_columns = false;

  void validate() const {
    require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "ensemble needs m >= 1 and N >= 1");
    require(kind != EnsembleTag::Custom, ErrorCode::InvalidArgument,
            "custom matrices are read from files, not generated");
    if (scale) {
      require(std::isfinite(*scale) && *scale > 0.0, ErrorCode::InvalidArgument,
              "ensemble scale must be positive");
    }
    if (kind == EnsembleTag::HadamardSub) {
      require((n & (n - 1)) == 0, ErrorCode::InvalidArgument,
              "Hadamard ensemble needs N a power of 2, got " + std::to_string(n));
      require(m <= n, ErrorCode::InvalidArgument, "Hadamard ensemble needs m <= N");
    }
  }
};

/// Sylvester construction: H_1 = (1), H_{2n} = [H_n, H_n; H_n, -H_n].
inline Matrix sylvester_hadamard(Eigen::Index n) {
  require(n >= 1 && (n & (n - 1)) == 0, ErrorCode::InvalidArgument,
          "Hadamard order must be a power of 2");
  Matrix h = Matrix::Ones(1, 1);
  while (h.rows() < n) {
    const Eigen::Index k = h.rows();
    Matrix next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

namespace detail {

// The unnormalized m x N matrix; Hadamard rows come out already permuted.
inline Matrix raw_ensemble(const EnsembleSpec& spec) {
  const Eigen::Index m = spec.m;
  const Eigen::Index n = spec.n;
  Matrix a(m, n);
  switch (spec.kind) {
    case EnsembleTag::Gaussian: {
      Rng rng(spec.seed, StreamTag::Matrix, 0);
      const double scale = spec.scale.value_or(1.0 / std::sqrt(static_cast<double>(m)));
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * rng.normal();
      break;
    }
    case EnsembleTag::Bernoulli: {
      Rng rng(spec.seed, StreamTag::Matrix, 0);
      const double scale = spec.scale.value_or(1.0 / std::sqrt(static_cast<double>(m)));
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * rng.sign();
      break;
    }
    case EnsembleTag::HadamardSub: {
      const Matrix h = sylvester_hadamard(n);
      Rng rng(spec.row_permutation_seed.value_or(spec.seed), StreamTag::HadamardRows, 0);
      const auto rows = rng.partial_permutation(n, m);
      for (Eigen::Index i = 0; i < m; ++i) a.row(i) = h.row(rows[static_cast<std::size_t>(i)]);
      break;
    }
    case EnsembleTag::Custom:
      break;
  }
  return a;
}

}  // namespace detail

/// Hadamard submatrices always have unit columns; the other ensembles only
/// when `normalize_columns` is set.
inline MeasurementMatrix generate(const EnsembleSpec& spec) {
  spec.validate();
  MeasurementMatrix out(detail::raw_ensemble(spec), spec.kind, false);
  if (spec.normalize_columns || spec.kind == EnsembleTag::HadamardSub) return out.normalized();
  return out;
}

/// Leading-row submatrices of one draw of `spec`, normalized afterwards when
/// requested.
inline std::vector<MeasurementMatrix> nested_row_prefix(const EnsembleSpec& spec,
                                                        const std::vector<Eigen::Index>& m_list) {
  spec.validate();
  const Matrix full = detail::raw_ensemble(spec);
  std::vector<MeasurementMatrix> out;
  Eigen::Index prev = 0;
  for (const Eigen::Index m : m_list) {
    require(m > prev && m <= spec.m, ErrorCode::InvalidArgument,
            "row counts must be increasing and at most m");
    prev = m;
    MeasurementMatrix sub(full.topRows(m), spec.kind, false);
    const bool normalize = spec.normalize_columns || spec.kind == EnsembleTag::HadamardSub;
    out.push_back(normalize ? sub.normalized() : sub);
  }
  return out;
}

}  // namespace qcmsv
