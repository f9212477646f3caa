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

#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "qcmsv/types.hpp"

namespace qcmsv {

/// Entrywise sign(z_i) * max(|z_i| - tau, 0).
inline Vector soft_threshold(const Vector& z, double tau) {
  require(tau >= 0.0, ErrorCode::InvalidArgument, "threshold must be nonnegative");
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z[i]) - tau;
    out[i] = a > 0.0 ? std::copysign(a, z[i]) : 0.0;
  }
  return out;
}

/// Euclidean projection onto {w : ||w||_1 <= r} by the sort and cumulative
/// sum threshold search.
inline Vector project_l1_ball(const Vector& z, double r) {
  require(r >= 0.0, ErrorCode::InvalidArgument, "l1 radius must be nonnegative");
  if (z.lpNorm<1>() <= r) return z;
  if (r == 0.0) return Vector::Zero(z.size());
  std::vector<double> u(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) u[i] = std::abs(z[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - r) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return soft_threshold(z, theta);
}

/// Orthogonal projector onto ker A. The kernel basis comes from a full SVD
/// with rank threshold sigma > 1e-10 * sigma_max and is immutable afterwards,
/// so one instance can be shared between threads.
class NullspaceProjector {
 public:
  static constexpr double kRankThreshold = 1e-10;

  explicit NullspaceProjector(const Matrix& a) : cols_(a.cols()) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    rank_ = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > kRankThreshold * smax) ++rank_;
    }
    basis_ = svd.matrixV().rightCols(cols_ - rank_);
  }

  Eigen::Index rank() const noexcept { return rank_; }
  Eigen::Index kernel_dimension() const noexcept { return cols_ - rank_; }
  bool trivial() const noexcept { return kernel_dimension() == 0; }

  /// Orthonormal kernel basis, N x dim(ker A).
  const Matrix& basis() const noexcept { return basis_; }

  Vector project(const Vector& z) const {
    require(!trivial(), ErrorCode::TrivialKernel, "ker A = {0}");
    require(z.size() == cols_, ErrorCode::InvalidArgument, "dimension mismatch in kernel projection");
    return basis_ * (basis_.transpose() * z);
  }

 private:
  Eigen::Index cols_;
  Eigen::Index rank_ = 0;
  Matrix basis_;
};

inline Vector project_nullspace(const Vector& z, const NullspaceProjector& cache) {
  return cache.project(z);
}

struct SingularRange {
  double max = 0.0;
  double min = 0.0;
};

/// Largest and smallest of the min(rows, cols) singular values.
inline SingularRange extreme_singular_values(const Matrix& m) {
  require(m.size() > 0, ErrorCode::InvalidArgument, "singular values of an empty matrix");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  return {sv[0], sv[sv.size() - 1]};
}

/// sigma_max(A)^2, the Lipschitz constant of the least-squares gradient.
inline double spectral_norm_squared(const Matrix& a) {
  const double s = Eigen::BDCSVD<Matrix>(a).singularValues()[0];
  return s * s;
}

}  // namespace qcmsv
