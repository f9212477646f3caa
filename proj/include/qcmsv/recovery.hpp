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

// The three convex recovery programs:
//
//   BP     min ||z||_1  s.t.  ||y - A z||_2 <= eps
//   DS     min ||z||_1  s.t.  ||A^T (y - A z)||_inf <= lambda
//   Lasso  min 1/2 ||y - A z||_2^2 + lambda ||z||_1
//
// BP with eps = 0 and DS are linear programs and go to the simplex. BP with
// eps > 0 uses ADMM and Lasso uses monotone FISTA; both finish with a
// support polish that solves the optimality system on the detected support
// and keeps the result only if it passes the full optimality check.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "qcmsv/lp.hpp"
#include "qcmsv/projections.hpp"
#include "qcmsv/simplex.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

struct NoiseModel {
  enum class Kind { L2Ball, CorrelatedInf, LassoPen };
  Kind kind = Kind::L2Ball;
  /// eps for L2Ball, lambda_N * sigma otherwise.
  double level = 0.0;
  /// Only for LassoPen, in (0, 1).
  double kappa = 0.5;

  static NoiseModel l2_ball(double eps) {
    require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
    return {Kind::L2Ball, eps, 0.0};
  }
  static NoiseModel correlated_inf(double lambda_sigma) {
    require(std::isfinite(lambda_sigma) && lambda_sigma >= 0.0, ErrorCode::InvalidArgument,
            "lambda*sigma must be >= 0");
    return {Kind::CorrelatedInf, lambda_sigma, 0.0};
  }
  static NoiseModel lasso_pen(double lambda_sigma, double kappa) {
    require(std::isfinite(lambda_sigma) && lambda_sigma >= 0.0, ErrorCode::InvalidArgument,
            "lambda*sigma must be >= 0");
    require(kappa > 0.0 && kappa < 1.0, ErrorCode::InvalidArgument, "kappa must lie in (0, 1)");
    return {Kind::LassoPen, lambda_sigma, kappa};
  }
};

inline std::string_view to_string(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::L2Ball: return "bp";
    case NoiseModel::Kind::CorrelatedInf: return "ds";
    case NoiseModel::Kind::LassoPen: return "lasso";
  }
  return "unknown";
}

struct RecoveryResult {
  Vector x_hat;
  int iterations = 0;
  std::vector<double> primal_residuals;
  bool converged = false;
  bool polished = false;
};

namespace detail {

inline void validate_system(const Matrix& a, const Vector& y) {
  require(a.rows() >= 1 && a.cols() >= 1, ErrorCode::InvalidArgument, "empty matrix");
  require(a.rows() == y.size(), ErrorCode::InvalidArgument,
          "measurement length " + std::to_string(y.size()) + " does not match " +
              std::to_string(a.rows()) + " rows");
  require(a.allFinite() && y.allFinite(), ErrorCode::NonFinite, "non-finite input");
}

inline std::vector<Eigen::Index> support_of(const Vector& x, double rel) {
  std::vector<Eigen::Index> s;
  const double cut = rel * x.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > cut) s.push_back(i);
  }
  return s;
}

inline Matrix columns(const Matrix& a, const std::vector<Eigen::Index>& s) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(s[k]);
  return out;
}

// Shared check for both polish steps: signs on the support are preserved
// and |a_i^T r| <= bound off the support.
inline bool signs_and_slack_ok(const Matrix& a, const Vector& r, const Vector& xs,
                               const Vector& sigma, const std::vector<Eigen::Index>& s,
                               double bound) {
  for (Eigen::Index k = 0; k < xs.size(); ++k) {
    if (xs[k] * sigma[k] <= 0.0) return false;
  }
  const Vector corr = a.transpose() * r;
  std::vector<bool> on(static_cast<std::size_t>(a.cols()), false);
  for (const auto i : s) on[static_cast<std::size_t>(i)] = true;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    if (!on[static_cast<std::size_t>(i)] && std::abs(corr[i]) > bound * (1.0 + 1e-9) + 1e-14) {
      return false;
    }
  }
  return true;
}

// Lasso optimality system on a support: A_S^T (y - A_S x_S) = lambda sigma.
inline std::optional<Vector> polish_lasso(const Matrix& a, const Vector& y, double lambda,
                                          const Vector& x) {
  const auto s = support_of(x, 1e-7);
  const Eigen::Index n = a.cols();
  if (s.empty()) return std::nullopt;
  const Matrix as = columns(a, s);
  Eigen::ColPivHouseholderQR<Matrix> qr(as);
  if (qr.rank() < as.cols()) return std::nullopt;
  Vector sigma(as.cols());
  for (std::size_t k = 0; k < s.size(); ++k) sigma[static_cast<Eigen::Index>(k)] = x[s[k]] > 0 ? 1.0 : -1.0;
  const Matrix gram = as.transpose() * as;
  const Vector xs = gram.ldlt().solve(as.transpose() * y - lambda * sigma);
  const Vector r = y - as * xs;
  if (!signs_and_slack_ok(a, r, xs, sigma, s, lambda)) return std::nullopt;
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < s.size(); ++k) out[s[k]] = xs[static_cast<Eigen::Index>(k)];
  return out;
}

// BP optimality system on a support: x_S = x_ls - gamma G^{-1} sigma with
// gamma > 0 fixed by ||y - A_S x_S||_2 = eps, and |a_i^T r| <= gamma off S.
inline std::optional<Vector> polish_bp(const Matrix& a, const Vector& y, double eps,
                                       const Vector& x) {
  const auto s = support_of(x, 1e-7);
  const Eigen::Index n = a.cols();
  if (s.empty() || static_cast<Eigen::Index>(s.size()) > a.rows()) return std::nullopt;
  const Matrix as = columns(a, s);
  Eigen::ColPivHouseholderQR<Matrix> qr(as);
  if (qr.rank() < as.cols()) return std::nullopt;
  Vector sigma(as.cols());
  for (std::size_t k = 0; k < s.size(); ++k) sigma[static_cast<Eigen::Index>(k)] = x[s[k]] > 0 ? 1.0 : -1.0;
  const Matrix gram = as.transpose() * as;
  const auto ldlt = gram.ldlt();
  const Vector x_ls = ldlt.solve(as.transpose() * y);
  const Vector r_ls = y - as * x_ls;
  const Vector dir = ldlt.solve(sigma);
  const Vector v = as * dir;
  const double slack = eps * eps - r_ls.squaredNorm();
  if (!(slack > 0.0) || !(v.squaredNorm() > 0.0)) return std::nullopt;
  const double gamma = std::sqrt(slack / v.squaredNorm());
  const Vector xs = x_ls - gamma * dir;
  const Vector r = y - as * xs;
  if (!signs_and_slack_ok(a, r, xs, sigma, s, gamma)) return std::nullopt;
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < s.size(); ++k) out[s[k]] = xs[static_cast<Eigen::Index>(k)];
  return out;
}

// min 1^T (u + v) s.t. [A_eq, -A_eq, extra] (u, v, w) = b; returns u - v.
inline std::optional<std::pair<Vector, int>> solve_split_lp(const Matrix& a_eq, const Matrix& extra,
                                                            const Vector& b, int max_pivots) {
  const Eigen::Index n = a_eq.cols();
  Matrix big(a_eq.rows(), 2 * n + extra.cols());
  big << a_eq, -a_eq, extra;
  Vector cost = Vector::Zero(big.cols());
  cost.head(2 * n).setOnes();
  SimplexOptions opts;
  opts.max_pivots = max_pivots;
  const DenseSimplex lp(big, b, opts);
  if (!lp.feasible()) return std::nullopt;
  const SimplexSolution sol = lp.minimize(cost);
  if (sol.status != SimplexStatus::Optimal) return std::make_pair(Vector(), sol.pivots);
  return std::make_pair(Vector(sol.x.head(n) - sol.x.segment(n, n)), sol.pivots);
}

}  // namespace detail

inline RecoveryResult solve_bp(const Matrix& a, const Vector& y, double eps,
                               const SolverConfig& cfg = {}) {
  detail::validate_system(a, y);
  cfg.validate();
  require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be >= 0");
  const Eigen::Index n = a.cols();
  const double tol = 1e-7 * (1.0 + y.norm());
  RecoveryResult res;

  if (eps == 0.0) {
    const auto lp = detail::solve_split_lp(a, Matrix(a.rows(), 0), y, cfg.max_iter);
    require(lp.has_value(), ErrorCode::Infeasible, "y is not in the range of A");
    res.iterations = lp->second;
    res.x_hat = lp->first.size() == n ? lp->first : Vector::Zero(n);
    const double resid = (y - a * res.x_hat).norm();
    res.primal_residuals.push_back(resid);
    res.converged = lp->first.size() == n && resid <= tol;
    return res;
  }
  if (y.norm() <= eps) {
    res.x_hat = Vector::Zero(n);
    res.primal_residuals.push_back(0.0);
    res.converged = true;
    return res;
  }

  // ADMM on x = z, A x - y = r with z in the l1 term and r in the eps-ball.
  // The x-update matrix I + A^T A does not depend on the penalty, so the
  // penalty can be rebalanced freely.
  const Eigen::LLT<Matrix> llt(Matrix::Identity(n, n) + a.transpose() * a);
  double rho = cfg.penalty;
  Vector x = Vector::Zero(n), z = Vector::Zero(n), u = Vector::Zero(n);
  Vector r = -y, w = Vector::Zero(a.rows());
  if (r.norm() > eps) r *= eps / r.norm();
  const double scale = std::max(1.0, y.norm());
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    x = llt.solve(z - u + a.transpose() * (y + r - w));
    const Vector ax = a * x;
    const Vector z_prev = z;
    const Vector r_prev = r;
    z = soft_threshold(x + u, 1.0 / rho);
    r = ax - y + w;
    const double rn = r.norm();
    if (rn > eps) r *= eps / rn;
    u += x - z;
    w += ax - y - r;
    const double primal = std::sqrt((x - z).squaredNorm() + (ax - y - r).squaredNorm());
    const double dual = rho * std::sqrt((z - z_prev).squaredNorm() + (r - r_prev).squaredNorm());
    res.primal_residuals.push_back(primal);
    if (primal <= cfg.tol_primal * scale && dual <= cfg.tol_primal * scale) break;
    if (it % 50 == 49) {
      if (const auto p = detail::polish_bp(a, y, eps, z)) {
        res.x_hat = *p;
        res.polished = true;
        break;
      }
    }
    if (primal > 10.0 * dual) {
      rho *= 2.0;
      u /= 2.0;
      w /= 2.0;
    } else if (dual > 10.0 * primal) {
      rho /= 2.0;
      u *= 2.0;
      w *= 2.0;
    }
  }
  res.iterations = std::min(it + 1, cfg.max_iter);
  if (res.polished) {
    res.converged = (y - a * res.x_hat).norm() <= eps + tol;
    return res;
  }
  res.x_hat = z;
  // A polished point passes the full optimality system, so it is the
  // minimizer even when the ADMM iterate has a slightly smaller l1 norm by
  // sitting just outside the ball.
  if (const auto p = detail::polish_bp(a, y, eps, z)) {
    res.x_hat = *p;
    res.polished = true;
  }
  res.converged = (y - a * res.x_hat).norm() <= eps + tol &&
                  (res.polished || it < cfg.max_iter);
  return res;
}

inline RecoveryResult solve_ds(const Matrix& a, const Vector& y, double lambda_sigma,
                               const SolverConfig& cfg = {}) {
  detail::validate_system(a, y);
  cfg.validate();
  require(std::isfinite(lambda_sigma) && lambda_sigma >= 0.0, ErrorCode::InvalidArgument,
          "lambda*sigma must be >= 0");
  const Eigen::Index n = a.cols();
  const Matrix gram = a.transpose() * a;
  const Vector corr = a.transpose() * y;
  const double tol = 1e-7 * std::max(1.0, corr.lpNorm<Eigen::Infinity>());
  RecoveryResult res;
  if (corr.lpNorm<Eigen::Infinity>() <= lambda_sigma) {
    res.x_hat = Vector::Zero(n);
    res.primal_residuals.push_back(0.0);
    res.converged = true;
    return res;
  }
  // G (u - v) - s1 = c - lambda,  G (u - v) + s2 = c + lambda.
  Matrix eq(2 * n, n);
  eq << gram, gram;
  Matrix slack = Matrix::Zero(2 * n, 2 * n);
  slack.topLeftCorner(n, n) = -Matrix::Identity(n, n);
  slack.bottomRightCorner(n, n) = Matrix::Identity(n, n);
  Vector b(2 * n);
  b << corr - Vector::Constant(n, lambda_sigma), corr + Vector::Constant(n, lambda_sigma);
  const auto lp = detail::solve_split_lp(eq, slack, b, cfg.max_iter);
  require(lp.has_value(), ErrorCode::Infeasible, "Dantzig selector constraints are infeasible");
  res.iterations = lp->second;
  res.x_hat = lp->first.size() == n ? lp->first : Vector::Zero(n);
  const double viol = (a.transpose() * (y - a * res.x_hat)).lpNorm<Eigen::Infinity>() - lambda_sigma;
  res.primal_residuals.push_back(std::max(viol, 0.0));
  res.converged = lp->first.size() == n && viol <= tol;
  return res;
}

inline double lasso_objective(const Matrix& a, const Vector& y, double lambda, const Vector& x) {
  return 0.5 * (y - a * x).squaredNorm() + lambda * x.lpNorm<1>();
}

/// Worst violation of A^T (y - A x) in lambda * subdifferential(||x||_1).
inline double lasso_kkt_violation(const Matrix& a, const Vector& y, double lambda, const Vector& x) {
  const Vector g = a.transpose() * (y - a * x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i] == 0.0 ? std::abs(g[i]) - lambda
                                 : std::abs(g[i] - lambda * (x[i] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

inline RecoveryResult solve_lasso(const Matrix& a, const Vector& y, double lambda_sigma,
                                  const SolverConfig& cfg = {}) {
  detail::validate_system(a, y);
  cfg.validate();
  require(std::isfinite(lambda_sigma) && lambda_sigma >= 0.0, ErrorCode::InvalidArgument,
          "lambda*sigma must be >= 0");
  const Eigen::Index n = a.cols();
  const double scale = std::max(1.0, (a.transpose() * y).lpNorm<Eigen::Infinity>());
  const double tol = 1e-7 * scale;
  RecoveryResult res;
  if ((a.transpose() * y).lpNorm<Eigen::Infinity>() <= lambda_sigma) {
    res.x_hat = Vector::Zero(n);
    res.primal_residuals.push_back(0.0);
    res.converged = true;
    return res;
  }
  const double lip = std::max(spectral_norm_squared(a), 1e-300);
  Vector x = Vector::Zero(n), yk = x;
  double fx = lasso_objective(a, y, lambda_sigma, x);
  double t = 1.0;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const Vector cand =
        soft_threshold(yk + a.transpose() * (y - a * yk) / lip, lambda_sigma / lip);
    const double fc = lasso_objective(a, y, lambda_sigma, cand);
    const Vector prev = x;
    if (fc <= fx) {
      x = cand;
      fx = fc;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = x + (t / t_next) * (cand - x) + ((t - 1.0) / t_next) * (x - prev);
    t = t_next;
    const double kkt = lasso_kkt_violation(a, y, lambda_sigma, x);
    res.primal_residuals.push_back(kkt);
    if (kkt <= cfg.tol_primal * scale) break;
    if (it % 50 == 49) {
      if (const auto p = detail::polish_lasso(a, y, lambda_sigma, x)) {
        if (lasso_objective(a, y, lambda_sigma, *p) <= fx + 1e-12 * std::max(1.0, fx)) {
          x = *p;
          res.polished = true;
          break;
        }
      }
    }
  }
  res.iterations = std::min(it + 1, cfg.max_iter);
  if (!res.polished) {
    if (const auto p = detail::polish_lasso(a, y, lambda_sigma, x)) {
      if (lasso_objective(a, y, lambda_sigma, *p) <= fx + 1e-12 * std::max(1.0, fx)) {
        x = *p;
        res.polished = true;
      }
    }
  }
  res.x_hat = x;
  res.converged = lasso_kkt_violation(a, y, lambda_sigma, x) <= tol;
  return res;
}

inline RecoveryResult solve(const Matrix& a, const Vector& y, const NoiseModel& noise,
                            const SolverConfig& cfg = {}) {
  switch (noise.kind) {
    case NoiseModel::Kind::L2Ball: return solve_bp(a, y, noise.level, cfg);
    case NoiseModel::Kind::CorrelatedInf: return solve_ds(a, y, noise.level, cfg);
    case NoiseModel::Kind::LassoPen: return solve_lasso(a, y, noise.level, cfg);
  }
  return {};
}

}  // namespace qcmsv
