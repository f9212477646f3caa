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

// q-ratio constrained minimal singular value
//
//   rho_{q,s}(A) = min { ||A z||_2 / ||z||_q : z != 0, s_q(z) <= s },
//
// equivalently min ||A z||_2 over ||z||_q = 1, ||z||_1 <= s^{(q-1)/q}.
//
// Finite q is nonconvex and handled by multi-start projected gradient on the
// scale-free ratio ||Az||_2^2 / ||z||_q^2. The step is pulled back into the
// feasible cone by soft thresholding at the smallest level that restores
// s_q <= s, then renormalized; the ratio is unchanged by the renormalization.
//
// q = inf splits into N convex programs: with z_j = 1 pinned,
//   min ||A z||_2^2  s.t.  |z_i| <= 1,  ||z||_1 <= s,
// so the estimate there is global up to solver tolerance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "qcmsv/lp.hpp"
#include "qcmsv/parallel.hpp"
#include "qcmsv/projections.hpp"
#include "qcmsv/random.hpp"
#include "qcmsv/sparsity.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

struct CmsvRequest {
  MeasurementMatrix a;
  QParam q = QParam::finite(2.0);
  double s = 1.0;
  int restarts = 30;
  std::uint64_t seed = 0;
  SolverConfig solver{5000, 1e-8, 1e-7, 1.0, 0};
  unsigned threads = 1;
};

struct CmsvEstimate {
  double value = 0.0;
  Vector minimizer;
  std::vector<double> trial_values;
  QParam q = QParam::finite(2.0);
  double s = 1.0;
  EstimateDirection direction = EstimateDirection::UpperBound;
  /// First-order (KKT) residual of the minimizer, scaled by 1/L.
  double stationarity = 0.0;
};

namespace detail {

// l1 radius of the feasible set on the unit l_q sphere.
inline double cmsv_radius(const QParam& q, double s) {
  if (q.is_infinity()) return s;
  return std::pow(s, (q.value() - 1.0) / q.value());
}

inline void validate_cmsv_params(const QParam& q, double s, Eigen::Index n) {
  require(q.above_one(), ErrorCode::InvalidQ, "CMSV needs q > 1, got " + q.to_string());
  require(std::isfinite(s) && s >= 1.0 && s <= static_cast<double>(n), ErrorCode::InvalidS,
          "CMSV needs 1 <= s <= N, got s = " + std::to_string(s));
}

/// Feasibility test on the unit l_q sphere: ||z||_1 <= radius, with the
/// multiplicative slack used for returned minimizers.
inline bool cmsv_feasible(const Vector& z, double radius, double slack = 0.0) {
  return z.lpNorm<1>() <= radius * (1.0 + slack);
}

class FiniteQLocalSolver {
 public:
  FiniteQLocalSolver(const Matrix& a, double q, double s)
      : a_(a), q_(q), s_(s), qp_(QParam::finite(q)), radius_(cmsv_radius(qp_, s)) {
    lipschitz_ = 2.0 * spectral_norm_squared(a);
    if (!(lipschitz_ > 0.0)) lipschitz_ = 1.0;
  }

  double objective(const Vector& z) const { return (a_ * z).squaredNorm(); }

  /// Maps w back onto {s_q <= s} by soft thresholding and renormalizes to
  /// the unit l_q sphere. Returns an empty vector for w = 0.
  Vector retract(const Vector& w) const {
    const double top = w.cwiseAbs().maxCoeff();
    if (!(top > 0.0)) return Vector();
    Vector z = w;
    if (q_ratio_sparsity(z, qp_) > s_) {
      // Beyond the second largest magnitude the threshold leaves one entry.
      double second = 0.0;
      Eigen::Index arg = -1;
      int at_top = 0;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double v = std::abs(w[i]);
        if (v == top) {
          ++at_top;
          if (arg < 0) arg = i;
        } else {
          second = std::max(second, v);
        }
      }
      if (at_top > 1) {
        z = Vector::Zero(w.size());
        z[arg] = w[arg] > 0 ? 1.0 : -1.0;
        return z;
      }
      double lo = 0.0;
      double hi = second;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * top; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (q_ratio_sparsity(soft_threshold(w, mid), qp_) > s_) lo = mid;
        else hi = mid;
      }
      z = soft_threshold(w, hi);
    }
    return z / lq_norm(z, qp_);
  }

  /// Pulls w = z - t*grad back along the constraint gradient at the unit
  /// vector z, sign(w_i) (1 - R |z_i|^{q-1}), clamping entries that would
  /// cross zero. A KKT point is a fixed point of this map for every t.
  /// Falls back to soft thresholding if no admissible level is found.
  Vector retract(const Vector& w, const Vector& z) const {
    if (!(w.cwiseAbs().maxCoeff() > 0.0)) return Vector();
    if (q_ratio_sparsity(w, qp_) <= s_) return w / lq_norm(w, qp_);
    Vector d(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double sg = w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0);
      d[i] = sg * (1.0 - radius_ * std::pow(std::abs(z[i]), q_ - 1.0));
    }
    auto shifted = [&](double tau) {
      Vector v = w - tau * d;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] * w[i] <= 0.0) v[i] = 0.0;
      }
      return v;
    };
    auto feasible = [&](const Vector& v) {
      return v.cwiseAbs().maxCoeff() > 0.0 && q_ratio_sparsity(v, qp_) <= s_;
    };
    double hi = w.cwiseAbs().maxCoeff();
    int grow = 0;
    while (!feasible(shifted(hi)) && grow < 60) {
      hi *= 2.0;
      ++grow;
    }
    if (grow == 60) return retract(w);
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(shifted(mid))) hi = mid;
      else lo = mid;
    }
    const Vector v = shifted(hi);
    return v / lq_norm(v, qp_);
  }

  Vector gradient(const Vector& z, double f) const {
    Vector g = a_.transpose() * (a_ * z);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double v = z[i];
      if (v != 0.0) g[i] -= f * std::copysign(std::pow(std::abs(v), q_ - 1.0), v);
    }
    return 2.0 * g;
  }

  /// KKT residual on the unit sphere: min over nu >= 0 of the distance from
  /// -grad to nu times the subdifferential of ||z||_1 - R ||z||_q, relative
  /// to the Lipschitz scale. nu is forced to 0 when the l1 constraint is
  /// slack.
  double stationarity(const Vector& z) const {
    const Vector g = gradient(z, objective(z));
    const bool active = z.lpNorm<1>() >= radius_ * (1.0 - 1e-9);
    auto residual = [&](double nu) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] != 0.0) {
          const double dc = (z[i] > 0.0 ? 1.0 : -1.0) * (1.0 - radius_ * std::pow(std::abs(z[i]), q_ - 1.0));
          acc += std::pow(g[i] + nu * dc, 2);
        } else {
          acc += std::pow(std::max(std::abs(g[i]) - nu, 0.0), 2);
        }
      }
      return acc;
    };
    double best = residual(0.0);
    if (active) {
      // The support-only least-squares multiplier brackets the minimizer.
      double num = 0.0;
      double den = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (z[i] == 0.0) continue;
        const double dc = (z[i] > 0.0 ? 1.0 : -1.0) * (1.0 - radius_ * std::pow(std::abs(z[i]), q_ - 1.0));
        num -= g[i] * dc;
        den += dc * dc;
      }
      const double nu_ls = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
      double lo = 0.0;
      double hi = 2.0 * nu_ls + 10.0 * (g.cwiseAbs().maxCoeff() + 1e-300);
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (residual(m1) <= residual(m2)) hi = m2;
        else lo = m1;
      }
      best = std::min(best, residual(0.5 * (lo + hi)));
    }
    return std::sqrt(best) / lipschitz_;
  }

  /// Projected gradient from a feasible unit-sphere start: Barzilai-Borwein
  /// trial steps safeguarded by Armijo backtracking.
  Vector run(Vector z, int max_iter) const {
    double f = objective(z);
    double t = 1.0 / lipschitz_;
    const double t_min = 1e-14 / lipschitz_;
    const double t_max = 1e6 / lipschitz_;
    Vector g = gradient(z, f);
    for (int it = 0; it < max_iter; ++it) {
      bool accepted = false;
      Vector next;
      double f_next = f;
      while (t >= t_min) {
        next = retract(z - t * g, z);
        if (next.size() != 0) {
          f_next = objective(next);
          if (f_next <= f - 1e-4 * (next - z).squaredNorm() / t) {
            accepted = true;
            break;
          }
        }
        t *= 0.5;
      }
      if (!accepted) break;
      const Vector step = next - z;
      const double moved = step.norm();
      z = std::move(next);
      f = f_next;
      if (moved <= 1e-13) break;
      const Vector g_next = gradient(z, f);
      const double sy = step.dot(g_next - g);
      g = g_next;
      t = sy > 0.0 ? std::clamp(step.squaredNorm() / sy, t_min, t_max) : std::min(4.0 * t, t_max);
    }
    return z;
  }

  double radius() const { return radius_; }

 private:
  const Matrix& a_;
  double q_;
  double s_;
  QParam qp_;
  double radius_;
  double lipschitz_ = 1.0;
};

// Euclidean projection onto {|w_i| <= 1, ||w||_1 <= r} for the free
// coordinates: clip(S_tau(w), 1) with the smallest admissible tau.
inline Vector project_box_l1(const Vector& w, double r) {
  auto clipped = [&](double tau) {
    Vector out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double v = std::min(std::max(std::abs(w[i]) - tau, 0.0), 1.0);
      out[i] = std::copysign(v, w[i]);
    }
    return out;
  };
  Vector out = clipped(0.0);
  if (out.lpNorm<1>() <= r) return out;
  double lo = 0.0;
  double hi = w.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (clipped(mid).lpNorm<1>() > r) lo = mid;
    else hi = mid;
  }
  return clipped(hi);
}

struct PinnedResult {
  Vector z;
  double value;
  double stationarity;
};

// min ||A z||^2 with z_j = 1, |z_i| <= 1, ||z||_1 <= s, by monotone FISTA.
inline PinnedResult solve_pinned(const Matrix& a, double lipschitz, Eigen::Index j, double s,
                                 int max_iter) {
  const Eigen::Index n = a.cols();
  auto project = [&](Vector w) {
    Vector rest(n - 1);
    for (Eigen::Index i = 0, k = 0; i < n; ++i) {
      if (i != j) rest[k++] = w[i];
    }
    rest = project_box_l1(rest, s - 1.0);
    Vector out(n);
    for (Eigen::Index i = 0, k = 0; i < n; ++i) out[i] = i == j ? 1.0 : rest[k++];
    return out;
  };
  auto f = [&](const Vector& z) { return (a * z).squaredNorm(); };
  auto grad = [&](const Vector& z) -> Vector { return 2.0 * (a.transpose() * (a * z)); };
  Vector x = project(Vector::Unit(n, j));
  Vector y = x;
  double fx = f(x);
  double theta = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector cand = project(y - grad(y) / lipschitz);
    const double fc = f(cand);
    const Vector prev = x;
    if (fc <= fx) {
      x = cand;
      fx = fc;
    }
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    y = x + (theta / theta_next) * (cand - x) + ((theta - 1.0) / theta_next) * (x - prev);
    theta = theta_next;
    if ((cand - prev).norm() <= 1e-13 && (x - prev).norm() <= 1e-13) break;
  }
  const double station = (project(x - grad(x) / lipschitz) - x).norm();
  return {x, fx, station};
}

inline Vector cmsv_start(const Matrix& a, const FiniteQLocalSolver& solver, const QParam& q,
                         std::uint64_t seed, int trial) {
  const Eigen::Index n = a.cols();
  if (trial == 0) {
    // The canonical vector of the shortest column: optimal whenever s = 1.
    Eigen::Index best = 0;
    a.colwise().norm().minCoeff(&best);
    return Vector::Unit(n, best);
  }
  Rng rng(seed, StreamTag::CmsvStart, static_cast<std::uint64_t>(trial));
  Vector z = rng.normal_vector(n);
  z /= lq_norm(z, q);
  for (int rep = 0; rep < 10 && !cmsv_feasible(z, solver.radius()); ++rep) {
    z = project_l1_ball(z, solver.radius());
    z /= lq_norm(z, q);
  }
  if (!cmsv_feasible(z, solver.radius())) z = solver.retract(z);
  return z;
}

}  // namespace detail

inline CmsvEstimate estimate_cmsv(const CmsvRequest& req) {
  const Matrix& a = req.a.entries();
  const Eigen::Index n = a.cols();
  detail::validate_cmsv_params(req.q, req.s, n);
  require(req.restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
  req.solver.validate();

  CmsvEstimate est;
  est.q = req.q;
  est.s = req.s;
  const auto trials = static_cast<std::size_t>(req.restarts);
  est.trial_values.assign(trials, 0.0);
  std::vector<Vector> minimizers(trials);
  std::vector<double> station(trials, 0.0);

  if (req.q.is_infinity()) {
    // Trial t owns the pinned coordinates j = t, t + restarts, ...
    const double lipschitz = std::max(2.0 * spectral_norm_squared(a), 1e-300);
    parallel_for(trials, req.threads, [&](std::size_t t) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = static_cast<Eigen::Index>(t) % n; j < n;
           j += static_cast<Eigen::Index>(trials)) {
        const auto r = detail::solve_pinned(a, lipschitz, j, req.s, req.solver.max_iter);
        if (r.value < best) {
          best = r.value;
          minimizers[t] = r.z;
          station[t] = r.stationarity;
        }
      }
      est.trial_values[t] = std::sqrt(best);
    });
  } else {
    const detail::FiniteQLocalSolver solver(a, req.q.value(), req.s);
    parallel_for(trials, req.threads, [&](std::size_t t) {
      const Vector start = detail::cmsv_start(a, solver, req.q, req.seed, static_cast<int>(t));
      const Vector z = solver.run(start, req.solver.max_iter);
      minimizers[t] = z;
      est.trial_values[t] = std::sqrt(solver.objective(z));
      station[t] = solver.stationarity(z);
    });
  }
  const auto best = static_cast<std::size_t>(
      std::min_element(est.trial_values.begin(), est.trial_values.end()) -
      est.trial_values.begin());
  est.value = est.trial_values[best];
  est.minimizer = minimizers[best];
  est.stationarity = station[best];
  return est;
}

struct BruteForceOptions {
  std::int64_t samples = 100000;
  int polish_candidates = 100;
  int polish_steps = 2000;
  std::uint64_t seed = 0;
};

/// Sampling oracle for tiny N: draws from the cone measure of the unit l_q
/// sphere, keeps feasible points, and polishes the best ones by random
/// search. Always >= rho_{q,s}(A); converges to it from above.
inline double brute_force_cmsv(const Matrix& a, const QParam& q, double s,
                               const BruteForceOptions& opt = {}) {
  const Eigen::Index n = a.cols();
  detail::validate_cmsv_params(q, s, n);
  require(opt.samples >= 1, ErrorCode::InvalidArgument, "n_samples must be >= 1");
  const double radius = detail::cmsv_radius(q, s);
  auto value = [&](const Vector& z) { return (a * z).norm(); };

  using Entry = std::pair<double, std::int64_t>;
  std::priority_queue<Entry> keep;  // max-heap of the best candidates
  std::vector<Vector> pool;
  auto offer = [&](const Vector& z) {
    const double v = value(z);
    if (static_cast<int>(keep.size()) < opt.polish_candidates) {
      keep.push({v, static_cast<std::int64_t>(pool.size())});
      pool.push_back(z);
    } else if (v < keep.top().first) {
      const auto slot = keep.top().second;
      keep.pop();
      pool[static_cast<std::size_t>(slot)] = z;
      keep.push({v, slot});
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) offer(Vector::Unit(n, i));

  Rng rng(opt.seed, StreamTag::BruteForce, 0);
  Vector z(n);
  const double inv_q = q.is_infinity() ? 0.0 : 1.0 / q.value();
  for (std::int64_t k = 0; k < opt.samples; ++k) {
    if (q.is_infinity()) {
      for (Eigen::Index i = 0; i < n; ++i) z[i] = 2.0 * rng.uniform() - 1.0;
      z[static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)))] = rng.sign();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.sign() * std::pow(rng.gamma(inv_q), inv_q);
      z /= lq_norm(z, q);
    }
    if (detail::cmsv_feasible(z, radius)) offer(z);
  }

  // Random-search polish. Infeasible trials are pulled back by the smallest
  // soft threshold that restores ||z||_1 <= R ||z||_q, so the search can
  // slide along the constraint boundary.
  auto pull_back = [&](const Vector& w) -> Vector {
    auto ok = [&](const Vector& v) {
      const double nq = lq_norm(v, q);
      return nq > 0.0 && v.lpNorm<1>() <= radius * nq;
    };
    if (ok(w)) return w / lq_norm(w, q);
    double lo = 0.0;
    double hi = w.cwiseAbs().maxCoeff();
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(soft_threshold(w, mid)) ? hi : lo) = mid;
    }
    const Vector v = soft_threshold(w, hi);
    if (!ok(v)) return Vector();
    return v / lq_norm(v, q);
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < pool.size(); ++c) {
    Rng local(opt.seed, StreamTag::BruteForce, 1 + c);
    Vector cur = pool[c];
    double cur_v = value(cur);
    double step = 0.1;
    int misses = 0;
    for (int it = 0; it < opt.polish_steps && step > 1e-10; ++it) {
      const Vector trial = pull_back(cur + step * local.normal_vector(n));
      if (trial.size() != 0) {
        const double v = value(trial);
        if (v < cur_v) {
          cur = trial;
          cur_v = v;
          misses = 0;
          continue;
        }
      }
      if (++misses >= 20) {
        step *= 0.5;
        misses = 0;
      }
    }
    best = std::min(best, cur_v);
  }
  return best;
}

struct Proposition2Report {
  double exponent = 1.0;
  double rho_q1_s = 0.0;
  double rho_q2_se = 0.0;
  double rho_q1_se = 0.0;
  bool left_holds = false;
  bool right_holds = false;
  bool holds() const { return left_holds && right_holds; }
};

/// e = q2 (q1 - 1) / (q1 (q2 - 1)), with q1 = inf giving q2 / (q2 - 1).
inline double proposition2_exponent(const QParam& q1, const QParam& q2) {
  const double b = q2.value();
  if (q1.is_infinity()) return q2.is_infinity() ? 1.0 : b / (b - 1.0);
  const double a = q1.value();
  return b * (a - 1.0) / (a * (b - 1.0));
}

/// Evaluates rho_{q1,s} >= rho_{q2,s^e} >= s^{-e} rho_{q1,s^e} on oracle
/// values. `rel_tol` absorbs the oracle's overestimation and `abs_tol` the
/// round-off it leaves on a CMSV that is exactly zero.
inline Proposition2Report check_proposition2(const Matrix& a, const QParam& q1, const QParam& q2,
                                             double s, const BruteForceOptions& opt,
                                             double rel_tol = 0.02, double abs_tol = 1e-9) {
  require(q2.above_one() && q1.above_one() && !(q1 < q2), ErrorCode::InvalidOrder,
          "need 1 < q2 <= q1 <= inf");
  Proposition2Report rep;
  rep.exponent = proposition2_exponent(q1, q2);
  const double n = static_cast<double>(a.cols());
  require(s >= 1.0 && s <= std::pow(n, 1.0 / rep.exponent) * (1.0 + 1e-12), ErrorCode::InvalidS,
          "s outside [1, N^{1/e}]");
  const double se = std::min(std::pow(s, rep.exponent), n);
  rep.rho_q1_s = brute_force_cmsv(a, q1, s, opt);
  rep.rho_q2_se = brute_force_cmsv(a, q2, se, opt);
  rep.rho_q1_se = brute_force_cmsv(a, q1, se, opt);
  rep.left_holds = rep.rho_q1_s >= rep.rho_q2_se * (1.0 - rel_tol) - abs_tol;
  rep.right_holds = rep.rho_q2_se >= std::pow(s, -rep.exponent) * rep.rho_q1_se * (1.0 - rel_tol) - abs_tol;
  return rep;
}

}  // namespace qcmsv
