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

// Entropy-based sparsity measures.
//
// For a nonzero z the q-ratio sparsity is
//
//   s_q(z) = (||z||_1 / ||z||_q)^(q / (q - 1)) = exp(H_q(pi(z))),
//
// where pi(z) = |z| / ||z||_1 and H_q is the Renyi entropy of order q. The
// orders 0, 1 and infinity are limits: the support size, the exponential of
// the Shannon entropy and ||z||_1 / ||z||_inf. s_q(0) = 0 by convention.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qcmsv/types.hpp"

namespace qcmsv {

namespace detail {

// Entries of pi below this are treated as exact zeros in entropy sums.
inline constexpr double kEntropyFloor = 1e-300;

// Above this order the ratio form would need |z_i|^q, so the entropy form is
// evaluated with a log-sum-exp shift instead.
inline constexpr double kLargeOrder = 50.0;

inline double max_abs(const Vector& z) {
  return z.size() == 0 ? 0.0 : z.cwiseAbs().maxCoeff();
}

// (sum |z_i|^q)^(1/q) for finite q > 0, scaled by max|z_i| so large q
// cannot overflow.
inline double scaled_lq(const Vector& z, double q) {
  const double m = max_abs(z);
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  if (q == 2.0) {
    for (double v : z) acc += (v / m) * (v / m);
    return m * std::sqrt(acc);
  }
  for (double v : z) {
    if (v != 0.0) acc += std::pow(std::abs(v) / m, q);
  }
  return m * std::pow(acc, 1.0 / q);
}

}  // namespace detail

/// Extended l_q functional: support size for q = 0, l1 for q = 1, max
/// magnitude for q = inf, (sum |z_i|^q)^(1/q) otherwise (a quasi-norm when
/// q < 1).
inline double lq_norm(const Vector& z, const QParam& q) {
  switch (q.kind()) {
    case QParam::Kind::Zero:
      return static_cast<double>((z.array() != 0.0).count());
    case QParam::Kind::One:
      return z.lpNorm<1>();
    case QParam::Kind::Infinity:
      return detail::max_abs(z);
    case QParam::Kind::Finite:
      return detail::scaled_lq(z, q.value());
  }
  return 0.0;
}

/// pi(z) = |z| / ||z||_1. Throws ZeroSignal for z = 0.
inline Vector weight_distribution(const Vector& z) {
  const double l1 = z.lpNorm<1>();
  require(l1 > 0.0, ErrorCode::ZeroSignal, "weight distribution of the zero vector");
  return z.cwiseAbs() / l1;
}

/// Shannon entropy with 0 log 0 = 0.
inline double shannon_entropy(const Vector& pi) {
  double h = 0.0;
  for (double p : pi) {
    if (p > detail::kEntropyFloor) h -= p * std::log(p);
  }
  return h;
}

/// Renyi entropy of order q (finite, q != 1) of a probability vector,
/// evaluated as log(sum exp(q log p_i)) / (1 - q) with a max shift.
inline double renyi_entropy(const Vector& pi, double q) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (double p : pi) {
    if (p > detail::kEntropyFloor) max_log = std::max(max_log, q * std::log(p));
  }
  double acc = 0.0;
  for (double p : pi) {
    if (p > detail::kEntropyFloor) acc += std::exp(q * std::log(p) - max_log);
  }
  return (max_log + std::log(acc)) / (1.0 - q);
}

/// q-ratio sparsity s_q(z) in [0, N].
inline double q_ratio_sparsity(const Vector& z, const QParam& q) {
  const double l1 = z.lpNorm<1>();
  if (l1 == 0.0) return 0.0;
  switch (q.kind()) {
    case QParam::Kind::Zero:
      return lq_norm(z, q);
    case QParam::Kind::One:
      return std::exp(shannon_entropy(weight_distribution(z)));
    case QParam::Kind::Infinity:
      return l1 / detail::max_abs(z);
    case QParam::Kind::Finite:
      break;
  }
  const double qv = q.value();
  if (qv > detail::kLargeOrder) {
    return std::exp(renyi_entropy(weight_distribution(z), qv));
  }
  return std::pow(l1 / detail::scaled_lq(z, qv), qv / (qv - 1.0));
}

/// l1 error of the best k-term approximation: the sum of the N - k smallest
/// magnitudes.
inline double best_k_term_error(const Vector& x, Eigen::Index k) {
  require(k >= 0 && k <= x.size(), ErrorCode::InvalidArgument,
          "k must lie in [0, N], got " + std::to_string(k));
  std::vector<double> mags(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end());
  double tail = 0.0;
  for (Eigen::Index i = 0; i < x.size() - k; ++i) tail += mags[i];
  return tail;
}

/// Indices of the k largest magnitudes (ties broken by lower index).
inline std::vector<Eigen::Index> largest_support(const Vector& x, Eigen::Index k) {
  require(k >= 0 && k <= x.size(), ErrorCode::InvalidArgument, "k must lie in [0, N]");
  std::vector<Eigen::Index> idx(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace qcmsv
