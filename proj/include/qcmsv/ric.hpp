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

// Monte Carlo restricted isometry constant and the RIC-based error bound.
//
// Draw d samples a support from the stream (seed, RicSupport, d) as a prefix
// of a Fisher-Yates shuffle, so estimates for different k share the draw
// schedule and the supports for k are nested inside those for k + 1.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qcmsv/parallel.hpp"
#include "qcmsv/random.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

struct RicEstimate {
  double delta = 0.0;
  std::int64_t k = 1;
  std::int64_t n_samples = 0;
  EstimateDirection direction = EstimateDirection::LowerBound;
  /// 2k > m: the smallest singular value is zero and delta >= 1.
  bool degenerate = false;
  bool unit_columns = true;
};

/// max(sigma_1^2 - 1, 1 - sigma_min^2) of the columns in `support`, with
/// sigma_min = 0 when there are more columns than rows. Works on the Gram
/// eigenvalues, so exactly orthonormal columns give exactly 0.
inline double isometry_defect(const Matrix& a, const std::vector<Eigen::Index>& support) {
  Matrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    sub.col(static_cast<Eigen::Index>(j)) = a.col(support[j]);
  }
  const Matrix gram = sub.transpose() * sub;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = ev[ev.size() - 1];
  const double bottom = sub.cols() > sub.rows() ? 0.0 : std::max(ev[0], 0.0);
  return std::max(top - 1.0, 1.0 - bottom);
}

inline RicEstimate estimate_ric(const MeasurementMatrix& mat, std::int64_t k,
                                std::int64_t n_samples = 1000, std::uint64_t seed = 0,
                                unsigned threads = 1) {
  const Matrix& a = mat.entries();
  const Eigen::Index n = a.cols();
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(2 * k <= n, ErrorCode::InvalidArgument,
          "2k = " + std::to_string(2 * k) + " exceeds N = " + std::to_string(n));
  require(n_samples >= 1, ErrorCode::InvalidArgument, "n_samples must be >= 1");

  RicEstimate est;
  est.k = k;
  est.n_samples = n_samples;
  est.degenerate = 2 * k > a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(a.col(j).norm() - 1.0) > 1e-8) est.unit_columns = false;
  }

  std::vector<double> defects(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(defects.size(), threads, [&](std::size_t d) {
    Rng rng(seed, StreamTag::RicSupport, d);
    defects[d] = isometry_defect(a, rng.partial_permutation(n, 2 * k));
  });
  for (const double v : defects) est.delta = std::max(est.delta, v);
  est.delta = std::max(est.delta, 0.0);
  return est;
}

/// C k^{1/q - 1/2} eps with C = 4 sqrt(1 + delta) / (1 - (1 + sqrt 2) delta).
/// Empty when delta >= sqrt(2) - 1.
inline std::optional<double> ric_bound(double delta, std::int64_t k, double q, double eps) {
  require(q >= 1.0 && q <= 2.0, ErrorCode::InvalidQ, "RIC bound needs q in [1, 2]");
  require(std::isfinite(delta) && delta >= 0.0, ErrorCode::InvalidArgument, "delta must be >= 0");
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  if (delta >= std::numbers::sqrt2 - 1.0) return std::nullopt;
  const double c = 4.0 * std::sqrt(1.0 + delta) / (1.0 - (1.0 + std::numbers::sqrt2) * delta);
  return c * std::pow(static_cast<double>(k), 1.0 / q - 0.5) * eps;
}

}  // namespace qcmsv
