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

// Exhaustive oracles for tiny instances. Nothing here calls the solvers it is
// used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "qcmsv/types.hpp"

namespace qcmsv::testing_oracles {

inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Vertices of {A z = b, ||z||_1 <= r}, found as the nonnegative basic
/// solutions of the split system [A, -A, 0; 1, 1, 1] (u, v, t) = (b, r).
inline std::vector<Vector> l1_slice_vertices(const Matrix& a, const Vector& b, double r) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Matrix big = Matrix::Zero(m + 1, 2 * n + 1);
  big.topLeftCorner(m, n) = a;
  big.block(0, n, m, n) = -a;
  big.row(m).setOnes();
  Vector rhs(m + 1);
  rhs.head(m) = b;
  rhs[m] = r;
  std::vector<Vector> out;
  for_each_subset(2 * n + 1, m + 1, [&](const std::vector<int>& cols) {
    Matrix basis(m + 1, m + 1);
    for (int i = 0; i <= m; ++i) basis.col(i) = big.col(cols[i]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (lu.rank() < m + 1) return;
    const Vector xb = lu.solve(rhs);
    if (xb.minCoeff() < -1e-12) return;
    Vector z = Vector::Zero(n);
    for (int i = 0; i <= m; ++i) {
      if (cols[i] < n) z[cols[i]] += xb[i];
      else if (cols[i] < 2 * n) z[cols[i] - n] -= xb[i];
    }
    out.push_back(z);
  });
  return out;
}

inline std::optional<double> enumerate_l1_slice_lp(const Vector& c, const Matrix& a, const Vector& b,
                                                   double r) {
  std::optional<double> best;
  for (const Vector& z : l1_slice_vertices(a, b, r)) {
    const double v = c.dot(z);
    if (!best || v > *best) best = v;
  }
  return best;
}

/// Exact restricted isometry constant of order `order` over every column
/// subset, from the eigenvalues of the Gram matrices.
inline double exact_ric(const Matrix& a, int order) {
  double delta = 0.0;
  for_each_subset(static_cast<int>(a.cols()), order, [&](const std::vector<int>& cols) {
    Matrix sub(a.rows(), order);
    for (int i = 0; i < order; ++i) sub.col(i) = a.col(cols[i]);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.transpose() * sub);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = std::max(0.0, eig.eigenvalues().minCoeff());
    delta = std::max({delta, lmax - 1.0, 1.0 - lmin});
  });
  return delta;
}


/// min c^T x s.t. A x = b, x >= 0 by visiting every basis. Empty when
/// infeasible; unbounded problems are not detected.
inline std::optional<std::pair<double, Vector>> enumerate_standard_lp(const Vector& c, const Matrix& a,
                                                                      const Vector& b) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Eigen::FullPivLU<Matrix> full(a);
  const int rank = static_cast<int>(full.rank());
  std::optional<std::pair<double, Vector>> best;
  for_each_subset(n, rank, [&](const std::vector<int>& cols) {
    Matrix basis(m, rank);
    for (int i = 0; i < rank; ++i) basis.col(i) = a.col(cols[i]);
    Eigen::ColPivHouseholderQR<Matrix> qr(basis);
    if (qr.rank() < rank) return;
    const Vector xb = qr.solve(b);
    if ((basis * xb - b).norm() > 1e-9 * (1.0 + b.norm())) return;
    if (xb.minCoeff() < -1e-12) return;
    Vector x = Vector::Zero(n);
    for (int i = 0; i < rank; ++i) x[cols[i]] = std::max(xb[i], 0.0);
    const double v = c.dot(x);
    if (!best || v < best->first) best = std::make_pair(v, x);
  });
  return best;
}

/// Smallest l1 norm over {A z = y}.
inline std::optional<double> bp_exact_value(const Matrix& a, const Vector& y) {
  const Eigen::Index n = a.cols();
  Matrix big(a.rows(), 2 * n);
  big << a, -a;
  const auto r = enumerate_standard_lp(Vector::Ones(2 * n), big, y);
  if (!r) return std::nullopt;
  return r->first;
}

/// Smallest l1 norm over {||A^T (y - A z)||_inf <= lambda}.
inline std::optional<double> ds_exact_value(const Matrix& a, const Vector& y, double lambda) {
  const Eigen::Index n = a.cols();
  const Matrix g = a.transpose() * a;
  const Vector c = a.transpose() * y;
  // (u, v, s1, s2): G(u-v) - s1 = c - lambda, G(u-v) + s2 = c + lambda.
  Matrix big = Matrix::Zero(2 * n, 4 * n);
  big.block(0, 0, n, n) = g;
  big.block(0, n, n, n) = -g;
  big.block(0, 2 * n, n, n) = -Matrix::Identity(n, n);
  big.block(n, 0, n, n) = g;
  big.block(n, n, n, n) = -g;
  big.block(n, 3 * n, n, n) = Matrix::Identity(n, n);
  Vector rhs(2 * n);
  rhs << c - Vector::Constant(n, lambda), c + Vector::Constant(n, lambda);
  Vector cost = Vector::Zero(4 * n);
  cost.head(2 * n).setOnes();
  const auto r = enumerate_standard_lp(cost, big, rhs);
  if (!r) return std::nullopt;
  return r->first;
}

/// Cyclic coordinate descent for 1/2 ||y - A z||^2 + lambda ||z||_1.
inline Vector lasso_coordinate_descent(const Matrix& a, const Vector& y, double lambda,
                                       int sweeps = 200000, double tol = 1e-15) {
  const Eigen::Index n = a.cols();
  Vector z = Vector::Zero(n);
  Vector r = y;
  for (int s = 0; s < sweeps; ++s) {
    double change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nj = a.col(j).squaredNorm();
      if (nj == 0.0) continue;
      const double rho = a.col(j).dot(r) + nj * z[j];
      const double next = (rho > lambda ? rho - lambda : rho < -lambda ? rho + lambda : 0.0) / nj;
      if (next != z[j]) {
        r -= (next - z[j]) * a.col(j);
        change = std::max(change, std::abs(next - z[j]));
        z[j] = next;
      }
    }
    if (change < tol) break;
  }
  return z;
}

/// Smallest l1 norm over {||y - A z||_2 <= eps} through the Lasso path: the
/// residual norm of the Lasso solution increases with lambda, so bisect for
/// the lambda whose residual equals eps.
inline double bp_ball_value(const Matrix& a, const Vector& y, double eps) {
  if (y.norm() <= eps) return 0.0;
  double lo = 0.0;
  double hi = (a.transpose() * y).lpNorm<Eigen::Infinity>();
  Vector z;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    z = lasso_coordinate_descent(a, y, mid);
    ((y - a * z).norm() > eps ? hi : lo) = mid;
  }
  return lasso_coordinate_descent(a, y, lo).lpNorm<1>();
}

}  // namespace qcmsv::testing_oracles
