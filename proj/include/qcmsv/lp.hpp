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

// Linear programs over an affine slice of the l1 ball:
//
//   maximize c^T z  subject to  A z = b,  ||z||_1 <= r.
//
// With z = u - v, u, v >= 0 and a slack t for the l1 row this is a standard
// form program with m + 1 rows, handed to the dense simplex. Every answer is
// checked against the dual bound
//
//   c^T z <= b^T lambda + r ||c - A^T lambda||_inf   for every lambda,
//
// evaluated at the simplex multipliers, so `duality_gap` is a certificate and
// not an estimate.

#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "qcmsv/random.hpp"
#include "qcmsv/simplex.hpp"
#include "qcmsv/types.hpp"

namespace qcmsv {

struct SolverConfig {
  int max_iter = 50000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-7;
  double penalty = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    require(max_iter >= 1, ErrorCode::InvalidArgument, "max_iter must be >= 1");
    require(tol_primal > 0.0 && tol_dual > 0.0, ErrorCode::InvalidArgument,
            "solver tolerances must be positive");
    require(penalty > 0.0, ErrorCode::InvalidArgument, "penalty parameter must be positive");
  }
};

struct LpProblem {
  Vector objective;
  Matrix equality;  // may have zero rows
  Vector rhs;
  double l1_bound = 1.0;
};

enum class LpStatus { Optimal, MaxIter, Infeasible };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::MaxIter: return "max_iter";
    case LpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

struct LpResult {
  Vector z;
  double value = 0.0;
  LpStatus status = LpStatus::MaxIter;
  int iterations = 0;
  double primal_violation = 0.0;
  double duality_gap = 0.0;
};

/// A feasible basis for {A z = b, ||z||_1 <= r} computed once and reused for
/// any number of objectives. Immutable after construction.
class L1BallLp {
 public:
  L1BallLp(const Matrix& equality, const Vector& rhs, double l1_bound, SolverConfig cfg = {})
      : equality_(equality), rhs_(rhs), bound_(l1_bound), cfg_(cfg) {
    cfg_.validate();
    require(equality.rows() == rhs.size(), ErrorCode::InvalidArgument,
            "equality matrix and right-hand side disagree");
    require(l1_bound >= 0.0, ErrorCode::InvalidArgument, "l1 bound must be nonnegative");
    const Eigen::Index m = equality.rows();
    const Eigen::Index n = equality.cols();
    Matrix a = Matrix::Zero(m + 1, 2 * n + 1);
    a.topLeftCorner(m, n) = equality;
    a.block(0, n, m, n) = -equality;
    a.row(m).head(2 * n).setOnes();
    a(m, 2 * n) = 1.0;
    Vector b(m + 1);
    b.head(m) = rhs;
    b[m] = l1_bound;
    detail::SimplexOptions opts;
    opts.max_pivots = cfg_.max_iter;
    // Slices through the origin are massively degenerate at z = 0. Phase 1
    // and most of phase 2 run on b + A w for a tiny random w, which keeps the
    // program feasible and its vertices generic; every solve ends with a
    // repair onto the exact right-hand side.
    if (m > 0 && l1_bound > 0.0) {
      Rng rng(cfg_.seed, StreamTag::LpShift, 0);
      Vector w(n);
      for (Eigen::Index j = 0; j < n; ++j) w[j] = rng.uniform() - 0.5;
      w *= kShiftFraction * l1_bound / std::max(w.lpNorm<1>(), 1e-300);
      Vector shift = Vector::Zero(m + 1);
      shift.head(m) = equality * w;
      auto shifted = std::make_shared<const detail::DenseSimplex>(a, b, shift, opts);
      if (shifted->feasible()) {
        simplex_ = std::move(shifted);
        return;
      }
    }
    simplex_ = std::make_shared<const detail::DenseSimplex>(a, b, opts);
  }

  bool feasible() const { return simplex_->feasible(); }
  Eigen::Index dimension() const { return equality_.cols(); }

  LpResult maximize(const Vector& c) const {
    const Eigen::Index n = equality_.cols();
    require(c.size() == n, ErrorCode::InvalidArgument, "objective has the wrong length");
    LpResult res;
    if (!simplex_->feasible()) {
      res.status = LpStatus::Infeasible;
      res.z = Vector::Zero(n);
      return res;
    }
    Vector cost(2 * n + 1);
    cost.head(n) = -c;
    cost.segment(n, n) = c;
    cost[2 * n] = 0.0;
    const detail::SimplexSolution sol = simplex_->minimize(cost);
    res.iterations = sol.pivots;
    res.z = sol.x.head(n) - sol.x.segment(n, n);
    res.value = c.dot(res.z);

    const Eigen::Index m = equality_.rows();
    double violation = std::max(0.0, res.z.lpNorm<1>() - bound_);
    if (m > 0) {
      violation = std::max(violation, (equality_ * res.z - rhs_).lpNorm<Eigen::Infinity>());
    }
    res.primal_violation = violation;

    // Simplex multipliers of the equality rows give lambda = -y.
    const Vector lambda = -sol.duals.head(m);
    const Vector slope = m > 0 ? Vector(c - equality_.transpose() * lambda) : c;
    const double dual_bound = (m > 0 ? rhs_.dot(lambda) : 0.0) + bound_ * slope.lpNorm<Eigen::Infinity>();
    res.duality_gap = dual_bound - res.value;

    const double scale = std::max(1.0, bound_ * c.lpNorm<Eigen::Infinity>());
    const bool converged = sol.status == detail::SimplexStatus::Optimal &&
                           res.primal_violation <= cfg_.tol_primal &&
                           res.duality_gap <= cfg_.tol_dual * scale;
    res.status = converged ? LpStatus::Optimal : LpStatus::MaxIter;
    return res;
  }

 private:
  static constexpr double kShiftFraction = 1e-6;

  Matrix equality_;
  Vector rhs_;
  double bound_;
  SolverConfig cfg_;
  std::shared_ptr<const detail::DenseSimplex> simplex_;
};

inline LpResult solve_lp(const LpProblem& p, const SolverConfig& cfg = {}) {
  const Eigen::Index n = p.objective.size();
  require(n >= 1, ErrorCode::InvalidArgument, "LP needs at least one variable");
  const Matrix eq = p.equality.size() == 0 ? Matrix(0, n) : p.equality;
  const Vector rhs = p.rhs.size() == 0 ? Vector(0) : p.rhs;
  require(eq.cols() == n, ErrorCode::InvalidArgument, "equality matrix has the wrong width");
  return L1BallLp(eq, rhs, p.l1_bound, cfg).maximize(p.objective);
}

}  // namespace qcmsv
