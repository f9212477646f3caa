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

// Certified sparsity levels for noise-free basis pursuit.
//
// Every k-sparse x is the unique l1 minimizer of {z : Az = Ax} whenever
//
//   k < min_{z in ker A \ {0}} 2^{q/(1-q)} s_q(z)
//     = 2^{q/(1-q)} (1 / max{||z||_q : Az = 0, ||z||_1 <= 1})^{q/(q-1)}.
//
// For q = inf the inner maximum is max_i max{z_i : Az = 0, ||z||_1 <= 1},
// N linear programs, and the level is exact. For finite q the maximum of a
// convex function over a polytope is approximated from below by the
// convex-concave procedure, so the resulting level may be optimistic.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcmsv/lp.hpp"
#include "qcmsv/parallel.hpp"
#include "qcmsv/projections.hpp"
#include "qcmsv/random.hpp"
#include "qcmsv/sparsity.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

enum class Certificate { Exact, HeuristicUpper };

inline std::string_view to_string(Certificate c) {
  return c == Certificate::Exact ? "EXACT" : "HEURISTIC_UPPER";
}

struct VerificationResult {
  QParam q = QParam::infinity();
  double opt_value = 0.0;
  /// 2^{q/(1-q)} (1/opt)^{q/(q-1)}; +inf when the kernel is trivial.
  double bound = 0.0;
  std::int64_t k_max = 0;
  Certificate certificate = Certificate::Exact;
  Vector witness;
  std::vector<double> trace;
};

enum class VerifyMethod { Linf, Ccp };

struct VerifyOptions {
  SolverConfig solver;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  int ccp_max_iter = 200;
  double ccp_tol = 1e-8;
  int ccp_random_inits = 5;
};

/// Largest integer strictly below `bound`; values within 1e-9 of an integer
/// count as that integer. Clamped to [0, n].
inline std::int64_t strict_floor(double bound, Eigen::Index n) {
  if (!(bound > 0.0)) return 0;
  if (bound >= static_cast<double>(n) + 1.0) return n;
  const double r = std::round(bound);
  const double k = std::abs(bound - r) <= 1e-9 ? r - 1.0 : std::floor(bound);
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(k), 0, n);
}

/// Sparsity bound from the optimal value of max ||z||_q over the kernel
/// slice of the l1 ball.
inline double sparsity_bound(const QParam& q, double opt) {
  require(q.above_one(), ErrorCode::InvalidQ, "sparsity bound needs q > 1");
  if (!(opt > 0.0)) return std::numeric_limits<double>::infinity();
  if (q.is_infinity()) return 1.0 / (2.0 * opt);
  const double p = q.value() / (q.value() - 1.0);
  return std::pow(2.0, -p) * std::pow(1.0 / opt, p);
}

namespace detail {

inline VerificationResult trivial_kernel_result(const QParam& q, Eigen::Index n) {
  VerificationResult r;
  r.q = q;
  r.opt_value = 0.0;
  r.bound = std::numeric_limits<double>::infinity();
  r.k_max = n;
  r.certificate = Certificate::Exact;
  r.witness = Vector::Zero(n);
  return r;
}

inline bool kernel_trivial(const Matrix& a) { return NullspaceProjector(a).trivial(); }

inline void finish(VerificationResult& r, Eigen::Index n) {
  r.bound = sparsity_bound(r.q, r.opt_value);
  r.k_max = strict_floor(r.bound, n);
}

}  // namespace detail

inline VerificationResult verify_linf(const MeasurementMatrix& mat, const VerifyOptions& opt = {}) {
  const Matrix& a = mat.entries();
  const Eigen::Index n = a.cols();
  if (detail::kernel_trivial(a)) return detail::trivial_kernel_result(QParam::infinity(), n);
  const L1BallLp lp(a, Vector::Zero(a.rows()), 1.0, opt.solver);
  require(lp.feasible(), ErrorCode::NotConverged, "phase 1 failed on the kernel slice");
  std::vector<LpResult> results(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), opt.threads, [&](std::size_t i) {
    results[i] = lp.maximize(Vector::Unit(n, static_cast<Eigen::Index>(i)));
  });
  VerificationResult r;
  r.q = QParam::infinity();
  r.certificate = Certificate::Exact;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const LpResult& res = results[i];
    require(res.status == LpStatus::Optimal, ErrorCode::NotConverged,
            "linear program for coordinate " + std::to_string(i) +
                " did not converge: " + std::string(to_string(res.status)));
    if (r.witness.size() == 0 || res.value > r.opt_value) {
      r.opt_value = res.value;
      r.witness = res.z;
    }
  }
  detail::finish(r, n);
  return r;
}

namespace detail {

inline Vector lq_gradient(const Vector& z, double q) {
  const double norm = lq_norm(z, QParam::finite(q));
  Vector g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    g[i] = z[i] == 0.0 ? 0.0
                       : std::copysign(std::pow(std::abs(z[i]) / norm, q - 1.0), z[i]);
  }
  return g;
}

struct CcpRun {
  Vector z;
  double value = 0.0;
  std::vector<double> trace;
};

inline CcpRun ccp_from(const L1BallLp& lp, double q, Vector z, const VerifyOptions& opt) {
  const QParam qp = QParam::finite(q);
  CcpRun run;
  double cur = lq_norm(z, qp);
  run.trace.push_back(cur);
  for (int it = 0; it < opt.ccp_max_iter; ++it) {
    const LpResult res = lp.maximize(lq_gradient(z, q));
    require(res.status == LpStatus::Optimal, ErrorCode::NotConverged,
            "CCP subproblem did not converge at iteration " + std::to_string(it));
    const double next = lq_norm(res.z, qp);
    // The linearization is a global minorant, so the LP optimum never
    // loses ground; guard against solver noise anyway.
    if (next < cur) break;
    z = res.z;
    const double change = next - cur;
    cur = next;
    run.trace.push_back(cur);
    if (change < opt.ccp_tol) break;
  }
  run.z = z;
  run.value = cur;
  return run;
}

inline Vector random_kernel_point(const NullspaceProjector& proj, Eigen::Index n,
                                  std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, StreamTag::CcpStart, index);
  Vector z = proj.project(rng.normal_vector(n));
  return z / z.lpNorm<1>();
}

}  // namespace detail

/// Convex-concave procedure for max ||z||_q over {Az = 0, ||z||_1 <= 1}.
/// Without `init` the start is the witness of verify_linf; random kernel
/// starts are added on top and the best final objective is kept.
inline VerificationResult ccp_verify(const MeasurementMatrix& mat, const QParam& q,
                                     std::optional<Vector> init = std::nullopt,
                                     const VerifyOptions& opt = {}) {
  require(q.is_finite() && q.value() > 1.0, ErrorCode::InvalidQ,
          "CCP needs a finite q > 1, got " + q.to_string());
  const Matrix& a = mat.entries();
  const Eigen::Index n = a.cols();
  const NullspaceProjector proj(a);
  if (proj.trivial()) return detail::trivial_kernel_result(q, n);

  const L1BallLp lp(a, Vector::Zero(a.rows()), 1.0, opt.solver);
  std::vector<Vector> starts;
  if (init) {
    require(init->size() == n, ErrorCode::InvalidArgument, "CCP start has the wrong length");
    const double scale = std::max(1.0, a.norm());
    require((a * *init).norm() <= 1e-8 * scale * std::max(1.0, init->norm()) &&
                init->lpNorm<1>() <= 1.0 + 1e-8,
            ErrorCode::InvalidArgument, "CCP start must satisfy Az = 0 and ||z||_1 <= 1");
    starts.push_back(init->cwiseAbs().maxCoeff() > 0.0
                         ? *init
                         : detail::random_kernel_point(proj, n, opt.seed, 0));
  } else {
    starts.push_back(verify_linf(mat, opt).witness);
  }
  for (int r = 0; r < opt.ccp_random_inits; ++r) {
    starts.push_back(detail::random_kernel_point(proj, n, opt.seed, 1 + static_cast<std::uint64_t>(r)));
  }

  std::vector<detail::CcpRun> runs(starts.size());
  parallel_for(starts.size(), opt.threads, [&](std::size_t i) {
    runs[i] = detail::ccp_from(lp, q.value(), starts[i], opt);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].value > runs[best].value) best = i;
  }
  VerificationResult r;
  r.q = q;
  r.certificate = Certificate::HeuristicUpper;
  r.opt_value = runs[best].value;
  r.witness = runs[best].z;
  r.trace = runs[best].trace;
  detail::finish(r, n);
  return r;
}

/// k_max by the exact L-infinity programs (q = inf) or by CCP (finite q).
inline std::int64_t max_recoverable_sparsity(const MeasurementMatrix& mat, const QParam& q,
                                             VerifyMethod method, const VerifyOptions& opt = {}) {
  if (method == VerifyMethod::Linf) {
    require(q.is_infinity(), ErrorCode::InvalidQ, "the linf method certifies q = inf only");
    return verify_linf(mat, opt).k_max;
  }
  if (q.is_infinity()) return verify_linf(mat, opt).k_max;
  return ccp_verify(mat, q, std::nullopt, opt).k_max;
}

}  // namespace qcmsv
