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

// CMSV-based error bounds for BP, DS and Lasso.
//
// With p = q/(q-1) and c = 2 (exactly sparse) or c = 4 (compressible), the
// residual h = x_hat - x satisfies s_q(h) <= (c')^p k where c' = c for BP/DS
// and c' = c/(1-kappa) for Lasso. The bounds therefore need rho_{q,s} at that
// s; since s_q never exceeds N, a rho computed at s = N serves for any larger
// requirement.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qcmsv/cmsv.hpp"
#include "qcmsv/recovery.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

enum class BoundRegime { ExactSparse, Compressible };

inline std::string_view to_string(BoundRegime r) {
  return r == BoundRegime::ExactSparse ? "EXACT_SPARSE" : "COMPRESSIBLE";
}

struct BoundReport {
  QParam q = QParam::finite(2.0);
  std::int64_t k = 1;
  CmsvEstimate rho_used;
  BoundRegime regime = BoundRegime::ExactSparse;
  double bound_lq = 0.0;
  double bound_l1 = 0.0;
  /// max instead of sum of the noise and sparsity-defect parts; equal to the
  /// plain bounds in the exactly sparse regime.
  double bound_lq_max = 0.0;
  double bound_l1_max = 0.0;
  double sigma_k = 0.0;
  std::vector<std::string> caveat_flags;
};

/// Exponents shared by every bound: p = q/(q-1) and k^{1-1/q}, with q = inf
/// giving p = 1 and k^{1-1/q} = k.
struct BoundExponents {
  double p = 1.0;
  double k_pow = 1.0;  // k^{1-1/q}

  BoundExponents(const QParam& q, std::int64_t k) {
    require(q.above_one(), ErrorCode::InvalidQ, "error bounds need q > 1, got " + q.to_string());
    require(k >= 1, ErrorCode::InvalidArgument, "sparsity level k must be >= 1");
    const auto kd = static_cast<double>(k);
    if (q.is_infinity()) {
      p = 1.0;
      k_pow = kd;
    } else {
      p = q.value() / (q.value() - 1.0);
      k_pow = std::pow(kd, 1.0 - 1.0 / q.value());
    }
  }
};

/// The s at which rho must be evaluated for the given regime and program.
inline double required_cmsv_s(BoundRegime regime, const NoiseModel& noise, std::int64_t k,
                              const QParam& q) {
  const BoundExponents ex(q, k);
  double c = regime == BoundRegime::ExactSparse ? 2.0 : 4.0;
  if (noise.kind == NoiseModel::Kind::LassoPen) c /= 1.0 - noise.kappa;
  return std::pow(c, ex.p) * static_cast<double>(k);
}

/// required_cmsv_s clamped to [1, n], the value to hand to estimate_cmsv.
inline double cmsv_s_for(BoundRegime regime, const NoiseModel& noise, std::int64_t k,
                         const QParam& q, Eigen::Index n) {
  return std::clamp(required_cmsv_s(regime, noise, k, q), 1.0, static_cast<double>(n));
}

namespace detail {

inline bool same_s(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, b); }

inline void check_rho(const CmsvEstimate& rho, const QParam& q, double needed,
                      std::vector<std::string>& flags) {
  require(rho.q == q, ErrorCode::InvalidQ,
          "rho was computed for q = " + rho.q.to_string() + ", bound asks for q = " + q.to_string());
  const auto n = static_cast<double>(rho.minimizer.size());
  const bool exact = same_s(rho.s, needed);
  const bool clamped = n > 0.0 && needed > n && same_s(rho.s, n);
  require(exact || clamped, ErrorCode::SMismatch,
          "rho was computed at s = " + std::to_string(rho.s) + " but the bound needs s = " +
              std::to_string(needed));
  require(rho.value > 0.0, ErrorCode::NotApplicable, "rho = 0, the bound does not apply");
  if (clamped) flags.emplace_back("S_CLAMPED_TO_N");
  if (rho.direction == EstimateDirection::UpperBound) flags.emplace_back("RHO_UPPER_BOUND");
}

}  // namespace detail

inline BoundReport bound_theorem1(const CmsvEstimate& rho, std::int64_t k, const QParam& q,
                                  const NoiseModel& noise) {
  const BoundExponents ex(q, k);
  BoundReport r;
  r.q = q;
  r.k = k;
  r.regime = BoundRegime::ExactSparse;
  detail::check_rho(rho, q, required_cmsv_s(r.regime, noise, k, q), r.caveat_flags);
  r.rho_used = rho;
  const double p = rho.value;
  const double lvl = noise.level;
  switch (noise.kind) {
    case NoiseModel::Kind::L2Ball:
      r.bound_lq = 2.0 * lvl / p;
      r.bound_l1 = 4.0 * ex.k_pow * lvl / p;
      break;
    case NoiseModel::Kind::CorrelatedInf:
      r.bound_lq = 4.0 * ex.k_pow * lvl / (p * p);
      r.bound_l1 = 8.0 * ex.k_pow * ex.k_pow * lvl / (p * p);
      break;
    case NoiseModel::Kind::LassoPen: {
      const double kap = noise.kappa;
      r.bound_lq = (1.0 + kap) / (1.0 - kap) * 2.0 * ex.k_pow * lvl / (p * p);
      r.bound_l1 = (1.0 + kap) / ((1.0 - kap) * (1.0 - kap)) * 4.0 * ex.k_pow * ex.k_pow * lvl / (p * p);
      break;
    }
  }
  r.bound_lq_max = r.bound_lq;
  r.bound_l1_max = r.bound_l1;
  return r;
}

inline BoundReport bound_theorem2(const CmsvEstimate& rho, std::int64_t k, const QParam& q,
                                  const NoiseModel& noise, double sigma_k) {
  const BoundExponents ex(q, k);
  require(std::isfinite(sigma_k) && sigma_k >= 0.0, ErrorCode::InvalidArgument,
          "sigma_k must be >= 0");
  BoundReport r;
  r.q = q;
  r.k = k;
  r.regime = BoundRegime::Compressible;
  r.sigma_k = sigma_k;
  detail::check_rho(rho, q, required_cmsv_s(r.regime, noise, k, q), r.caveat_flags);
  r.rho_used = rho;
  const double p = rho.value;
  const double lvl = noise.level;
  const double defect_q = sigma_k / ex.k_pow;  // k^{1/q-1} sigma_k
  double noise_q = 0.0;
  double noise_l1 = 0.0;
  double defect_l1 = 4.0 * sigma_k;
  // ||h||_1 <= c1 (k^{1-1/q} ||h||_q + sigma_k), used for the max form.
  double c1 = 2.0;
  switch (noise.kind) {
    case NoiseModel::Kind::L2Ball:
      noise_q = 2.0 * lvl / p;
      noise_l1 = 4.0 * ex.k_pow * lvl / p;
      break;
    case NoiseModel::Kind::CorrelatedInf:
      noise_q = 8.0 * ex.k_pow * lvl / (p * p);
      noise_l1 = 16.0 * ex.k_pow * ex.k_pow * lvl / (p * p);
      break;
    case NoiseModel::Kind::LassoPen: {
      const double kap = noise.kappa;
      noise_q = (1.0 + kap) / (1.0 - kap) * 4.0 * ex.k_pow * lvl / (p * p);
      noise_l1 = (1.0 + kap) / ((1.0 - kap) * (1.0 - kap)) * 8.0 * ex.k_pow * ex.k_pow * lvl / (p * p);
      defect_l1 = 4.0 / (1.0 - kap) * sigma_k;
      c1 = 2.0 / (1.0 - kap);
      break;
    }
  }
  r.bound_lq = noise_q + defect_q;
  r.bound_l1 = noise_l1 + defect_l1;
  r.bound_lq_max = std::max(noise_q, defect_q);
  r.bound_l1_max = c1 * (ex.k_pow * r.bound_lq_max + sigma_k);
  return r;
}

}  // namespace qcmsv
