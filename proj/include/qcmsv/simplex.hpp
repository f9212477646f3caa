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

// Dense two-phase tableau simplex for standard-form programs
//
//   minimize c^T x  subject to  A x = b,  x >= 0.
//
// Phase 1 runs once per constraint system; the resulting feasible basis is
// kept so any number of objectives can be optimized over the same polytope.
// Pricing is Dantzig's rule, switching to Bland's rule after a run of
// degenerate pivots so cycling cannot occur. The final basis is reinverted
// from the original data with an LU factorization before the solution and
// the dual certificate are reported.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "qcmsv/types.hpp"

namespace qcmsv::detail {

enum class SimplexStatus { Optimal, Infeasible, Unbounded, MaxIter };

struct SimplexOptions {
  int max_pivots = 50000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-10;
  int degenerate_run_before_bland = 50;
  int max_reinversions = 4;
};

struct SimplexSolution {
  SimplexStatus status = SimplexStatus::MaxIter;
  Vector x;
  double value = 0.0;
  /// Multipliers y of A x = b in the caller's row orientation, so that
  /// c - A^T y >= 0 at an optimal basis.
  Vector duals;
  double min_reduced_cost = 0.0;
  double max_violation = 0.0;
  int pivots = 0;
};

class DenseSimplex {
 public:
  using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DenseSimplex(const Matrix& a, const Vector& b, SimplexOptions options = {})
      : DenseSimplex(a, b, Vector::Zero(b.size()), options) {}

  /// Phase 1 and the bulk of phase 2 run on the shifted right-hand side
  /// b + shift, which callers use to break degeneracy; the final basis is
  /// then repaired onto b itself with dual simplex pivots.
  DenseSimplex(const Matrix& a, const Vector& b, const Vector& shift, SimplexOptions options)
      : a_(a), b_(b), shift_(shift), options_(options) {
    require(a.rows() == b.size() && shift.size() == b.size(), ErrorCode::InvalidArgument,
            "simplex: A and b disagree");
    const Vector work = b + shift;
    row_sign_ = Vector::Ones(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (work[i] < 0.0 || (work[i] == 0.0 && b[i] < 0.0)) row_sign_[i] = -1.0;
    }
    run_phase1(work);
  }

  bool feasible() const noexcept { return feasible_; }
  int phase1_pivots() const noexcept { return phase1_pivots_; }
  Eigen::Index structural_columns() const noexcept { return a_.cols(); }

  /// Phase 2 from the stored feasible basis. Safe to call concurrently.
  SimplexSolution minimize(const Vector& c) const {
    require(c.size() == a_.cols(), ErrorCode::InvalidArgument, "simplex: objective size");
    SimplexSolution sol;
    if (!feasible_) {
      sol.status = SimplexStatus::Infeasible;
      return sol;
    }
    Tableau t = tableau_;
    std::vector<Eigen::Index> basis = basis_;
    const Eigen::Index n = a_.cols();
    int pivots = 0;
    Vector obj = objective_row(t, basis, c);
    SimplexStatus status = iterate(t, obj, basis, n, options_.max_pivots, pivots);
    for (int round = 0; status == SimplexStatus::Optimal && round <= options_.max_reinversions;
         ++round) {
      if (!reinvert(t, basis)) break;
      obj = objective_row(t, basis, c);
      status = dual_iterate(t, obj, basis, n, options_.max_pivots - pivots, pivots);
      if (status != SimplexStatus::Optimal) break;
      bool dual_ok = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (obj[j] < -options_.optimality_tol) dual_ok = false;
      }
      if (dual_ok) break;
      status = iterate(t, obj, basis, n, options_.max_pivots - pivots, pivots);
    }
    sol.status = status;
    sol.pivots = pivots;
    fill_solution(t, basis, c, sol);
    return sol;
  }

 private:
  // Reduced-cost row: d_j = c_j - sum_i c_{B_i} T(i, j); last entry holds
  // -(objective value).
  Vector objective_row(const Tableau& t, const std::vector<Eigen::Index>& basis,
                       const Vector& c) const {
    const Eigen::Index n = a_.cols();
    Vector obj = Vector::Zero(n + 1);
    obj.head(n) = c;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double cb = c[basis[i]];
      if (cb != 0.0) obj -= cb * t.row(static_cast<Eigen::Index>(i)).head(n + 1).transpose();
    }
    return obj;
  }

  static void pivot(Tableau& t, Vector& obj, std::vector<Eigen::Index>& basis, Eigen::Index r,
                    Eigen::Index e) {
    const double p = t(r, e);
    t.row(r) /= p;
    Vector col = t.col(e);
    col[r] = 0.0;
    const Eigen::RowVectorXd pr = t.row(r);
    t.noalias() -= col * pr;
    obj -= obj[e] * pr.transpose();
    t.col(e).setZero();
    t(r, e) = 1.0;
    obj[e] = 0.0;
    basis[r] = e;
  }

  // Runs pricing and ratio tests on columns [0, allowed) until optimal.
  SimplexStatus iterate(Tableau& t, Vector& obj, std::vector<Eigen::Index>& basis,
                        Eigen::Index allowed, int budget, int& pivots,
                        double stop_value = -std::numeric_limits<double>::infinity()) const {
    const Eigen::Index rhs = t.cols() - 1;
    int degenerate_run = 0;
    for (int it = 0; it < budget; ++it) {
      if (-obj[rhs] <= stop_value) return SimplexStatus::Optimal;
      const bool bland = degenerate_run >= options_.degenerate_run_before_bland;
      Eigen::Index enter = -1;
      double best = -options_.optimality_tol;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (obj[j] < best) {
          enter = j;
          if (bland) break;
          best = obj[j];
        }
      }
      if (enter < 0) return SimplexStatus::Optimal;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        const double a = t(i, enter);
        if (a <= options_.pivot_tol) continue;
        const double ratio = std::max(t(i, rhs), 0.0) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          leave = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + 1e-12) {
          const bool take = bland ? basis[i] < basis[leave] : a > t(leave, enter);
          if (take) {
            leave = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leave < 0) return SimplexStatus::Unbounded;
      degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
      pivot(t, obj, basis, leave, enter);
      ++pivots;
    }
    return SimplexStatus::MaxIter;
  }

  // Dual simplex on a dual-feasible tableau until the basic solution is
  // nonnegative.
  SimplexStatus dual_iterate(Tableau& t, Vector& obj, std::vector<Eigen::Index>& basis,
                             Eigen::Index allowed, int budget, int& pivots) const {
    const Eigen::Index rhs = t.cols() - 1;
    for (int it = 0; it < budget; ++it) {
      Eigen::Index leave = -1;
      double worst = -options_.feasibility_tol;
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        if (t(i, rhs) < worst) {
          worst = t(i, rhs);
          leave = i;
        }
      }
      if (leave < 0) return SimplexStatus::Optimal;
      Eigen::Index enter = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < allowed; ++j) {
        const double a = t(leave, j);
        if (a >= -options_.pivot_tol) continue;
        const double ratio = std::max(obj[j], 0.0) / -a;
        if (ratio < best_ratio - 1e-14 || (ratio <= best_ratio + 1e-14 && enter >= 0 &&
                                          -a > -t(leave, enter))) {
          best_ratio = std::min(ratio, best_ratio);
          enter = j;
        }
      }
      if (enter < 0) return SimplexStatus::Infeasible;
      pivot(t, obj, basis, leave, enter);
      ++pivots;
    }
    return SimplexStatus::MaxIter;
  }

  // Rebuilds the tableau as B^{-1} [A | b] from the original data.
  bool reinvert(Tableau& t, const std::vector<Eigen::Index>& basis) const {
    const Eigen::Index m = static_cast<Eigen::Index>(kept_rows_.size());
    const Eigen::Index n = a_.cols();
    Matrix rows(m, n + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index r = kept_rows_[i];
      rows.row(i).head(n) = row_sign_[r] * a_.row(r);
      rows(i, n) = row_sign_[r] * b_[r];
    }
    Matrix bmat(m, m);
    for (Eigen::Index i = 0; i < m; ++i) bmat.col(i) = rows.col(basis[i]);
    Eigen::PartialPivLU<Matrix> lu(bmat);
    if (m > 0 && !(std::abs(lu.determinant()) > 0.0)) return false;
    const Matrix fresh = m > 0 ? Matrix(lu.solve(rows)) : Matrix(0, n + 1);
    if (!fresh.allFinite()) return false;
    t = fresh;
    for (Eigen::Index i = 0; i < m; ++i) {
      t.col(basis[i]).setZero();
      t(i, basis[i]) = 1.0;
    }
    return true;
  }

  void fill_solution(const Tableau& t, const std::vector<Eigen::Index>& basis, const Vector& c,
                     SimplexSolution& sol) const {
    const Eigen::Index n = a_.cols();
    sol.x = Vector::Zero(n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      sol.x[basis[i]] = std::max(t(static_cast<Eigen::Index>(i), n), 0.0);
    }
    sol.value = c.dot(sol.x);
    sol.max_violation = (a_ * sol.x - b_).lpNorm<Eigen::Infinity>();

    // Duals from B^T y = c_B on the kept rows.
    const Eigen::Index m = static_cast<Eigen::Index>(kept_rows_.size());
    sol.duals = Vector::Zero(a_.rows());
    if (m > 0) {
      Matrix bmat(m, m);
      Vector cb(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) {
          const Eigen::Index r = kept_rows_[k];
          bmat(k, i) = row_sign_[r] * a_(r, basis[i]);
        }
        cb[i] = c[basis[i]];
      }
      const Vector y = bmat.transpose().partialPivLu().solve(cb);
      for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index r = kept_rows_[k];
        sol.duals[r] = row_sign_[r] * y[k];
      }
    }
    const Vector reduced = c - a_.transpose() * sol.duals;
    sol.min_reduced_cost = n > 0 ? reduced.minCoeff() : 0.0;
  }

  void run_phase1(const Vector& work) {
    const Eigen::Index m = a_.rows();
    const Eigen::Index n = a_.cols();
    Matrix a = a_;
    Vector b = work;
    for (Eigen::Index i = 0; i < m; ++i) {
      a.row(i) *= row_sign_[i];
      b[i] *= row_sign_[i];
    }

    // Reuse identity columns (slacks) as the starting basis where possible.
    std::vector<Eigen::Index> basis(m, -1);
    std::vector<bool> column_used(n, false);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index nz_row = -1;
      int nnz = 0;
      for (Eigen::Index i = 0; i < m && nnz < 2; ++i) {
        if (a(i, j) != 0.0) {
          ++nnz;
          nz_row = i;
        }
      }
      if (nnz == 1 && a(nz_row, j) == 1.0 && basis[nz_row] < 0) {
        basis[nz_row] = j;
        column_used[j] = true;
      }
    }
    Eigen::Index artificials = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < 0) ++artificials;
    }

    Tableau t = Tableau::Zero(m, n + artificials + 1);
    t.leftCols(n) = a;
    t.col(n + artificials) = b;
    Eigen::Index next_art = n;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < 0) {
        t(i, next_art) = 1.0;
        basis[i] = next_art++;
      }
    }

    // Phase 1 objective: minimize the sum of artificials.
    Vector obj = Vector::Zero(t.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] >= n) obj -= t.row(i).transpose();
    }
    for (Eigen::Index j = n; j < n + artificials; ++j) obj[j] = 0.0;

    int pivots = 0;
    const double tol = options_.feasibility_tol * (1.0 + b.lpNorm<Eigen::Infinity>());
    iterate(t, obj, basis, n, options_.max_pivots, pivots, tol);
    const double infeasibility = -obj[t.cols() - 1];
    if (infeasibility > tol) {
      feasible_ = false;
      phase1_pivots_ = pivots;
      return;
    }

    // Drive basic artificials out; rows with no structural entry are
    // redundant and dropped.
    std::vector<bool> redundant(m, false);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      Eigen::Index best = -1;
      double best_abs = options_.pivot_tol;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > best_abs) {
          best_abs = std::abs(t(i, j));
          best = j;
        }
      }
      if (best < 0) {
        redundant[i] = true;
        continue;
      }
      pivot(t, obj, basis, i, best);
      ++pivots;
    }

    for (Eigen::Index i = 0; i < m; ++i) {
      if (!redundant[i]) kept_rows_.push_back(i);
    }
    const Eigen::Index kept = static_cast<Eigen::Index>(kept_rows_.size());
    tableau_.resize(kept, n + 1);
    basis_.resize(kept);
    for (Eigen::Index k = 0; k < kept; ++k) {
      const Eigen::Index i = kept_rows_[k];
      tableau_.row(k).head(n) = t.row(i).head(n);
      tableau_(k, n) = std::max(t(i, t.cols() - 1), 0.0);
      basis_[k] = basis[i];
    }
    feasible_ = true;
    phase1_pivots_ = pivots;
  }

  Matrix a_;
  Vector b_;
  Vector shift_;
  SimplexOptions options_;
  Vector row_sign_;
  bool feasible_ = false;
  int phase1_pivots_ = 0;
  std::vector<Eigen::Index> kept_rows_;
  Tableau tableau_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace qcmsv::detail
