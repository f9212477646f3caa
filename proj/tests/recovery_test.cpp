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

#include <cmath>

#include <gtest/gtest.h>

#include "qcmsv/ensembles.hpp"
#include "qcmsv/recovery.hpp"
#include "qcmsv/sparsity.hpp"
#include "test_oracles.hpp"

namespace qcmsv {
namespace {

namespace oracle = testing_oracles;

Matrix gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  return generate({EnsembleTag::Gaussian, m, n, seed}).entries();
}

Vector sparse_signal(Rng& rng, Eigen::Index n, Eigen::Index k) {
  Vector x = Vector::Zero(n);
  for (const auto i : rng.partial_permutation(n, k)) x[i] = rng.normal();
  return x;
}

struct Instance {
  Matrix a;
  Vector x;
  Vector w;
};

Instance noisy_instance(std::uint64_t seed, Eigen::Index m, Eigen::Index n, Eigen::Index k,
                        double eps) {
  Rng rng(seed, StreamTag::Signal, 0);
  Instance in{gaussian(m, n, seed), sparse_signal(rng, n, k), rng.normal_vector(m)};
  in.w *= eps / in.w.norm();
  return in;
}

TEST(SolveBp, IdentityNoiseFreeReturnsY) {
  const Vector y = (Vector(4) << 1.0, -2.0, 0.0, 3.5).finished();
  const auto r = solve_bp(Matrix::Identity(4, 4), y, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.x_hat - y).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(SolveBp, OutOfRangeIsInfeasible) {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  const Vector y = (Vector(2) << 1.0, 2.0).finished();
  try {
    solve_bp(a, y, 0.0);
    FAIL() << "expected Infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(SolveBp, RejectsBadArguments) {
  const Matrix a = Matrix::Identity(2, 2);
  EXPECT_THROW(solve_bp(a, Vector::Ones(2), -1.0), Error);
  EXPECT_THROW(solve_bp(a, Vector::Ones(3), 0.0), Error);
}

TEST(SolveBp, NoiseFreeMatchesBasisEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = gaussian(4, 7, seed);
    Rng rng(seed, StreamTag::Signal, 0);
    const Vector y = a * sparse_signal(rng, 7, 3);
    const auto r = solve_bp(a, y, 0.0);
    ASSERT_TRUE(r.converged);
    const auto best = oracle::bp_exact_value(a, y);
    ASSERT_TRUE(best.has_value());
    EXPECT_NEAR(r.x_hat.lpNorm<1>(), *best, 1e-6 * std::max(1.0, *best)) << "seed " << seed;
    EXPECT_LE((y - a * r.x_hat).norm(), 1e-7 * (1.0 + y.norm()));
  }
}

TEST(SolveBp, NoisyMatchesLassoPathOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto in = noisy_instance(seed, 5, 10, 2, 0.1);
    const Vector y = in.a * in.x + in.w;
    const auto r = solve_bp(in.a, y, 0.1);
    ASSERT_TRUE(r.converged) << "seed " << seed;
    EXPECT_LE((y - in.a * r.x_hat).norm(), 0.1 + 1e-7 * (1.0 + y.norm()));
    const double best = oracle::bp_ball_value(in.a, y, 0.1);
    EXPECT_NEAR(r.x_hat.lpNorm<1>(), best, 1e-6 * std::max(1.0, best)) << "seed " << seed;
  }
}

TEST(SolveBp, LargeBallGivesZero) {
  const auto in = noisy_instance(3, 5, 10, 2, 0.1);
  const Vector y = in.a * in.x;
  const auto r = solve_bp(in.a, y, y.norm() * 1.01);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.x_hat.lpNorm<1>(), 0.0);
}

TEST(SolveDs, LargeLambdaGivesZero) {
  const auto in = noisy_instance(1, 6, 12, 2, 0.1);
  const Vector y = in.a * in.x;
  const auto r = solve_ds(in.a, y, (in.a.transpose() * y).lpNorm<Eigen::Infinity>());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.x_hat.lpNorm<1>(), 0.0);
}

TEST(SolveDs, OrthonormalColumnsZeroLambdaSolvesNormalEquations) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(8, 5, 4));
  const Matrix a = qr.householderQ() * Matrix::Identity(8, 5);
  Rng rng(4, StreamTag::Signal, 0);
  const Vector y = rng.normal_vector(8);
  const auto r = solve_ds(a, y, 0.0);
  ASSERT_TRUE(r.converged);
  EXPECT_LE((a.transpose() * y - a.transpose() * a * r.x_hat).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(SolveDs, MatchesBasisEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto in = noisy_instance(seed, 3, 4, 1, 0.2);
    const Vector y = in.a * in.x + in.w;
    const double lambda = (in.a.transpose() * in.w).lpNorm<Eigen::Infinity>();
    const auto r = solve_ds(in.a, y, lambda);
    ASSERT_TRUE(r.converged);
    const auto best = oracle::ds_exact_value(in.a, y, lambda);
    ASSERT_TRUE(best.has_value());
    EXPECT_NEAR(r.x_hat.lpNorm<1>(), *best, 1e-6 * std::max(1.0, *best)) << "seed " << seed;
    const double viol =
        (in.a.transpose() * (y - in.a * r.x_hat)).lpNorm<Eigen::Infinity>() - lambda;
    EXPECT_LE(viol, 1e-7 * std::max(1.0, (in.a.transpose() * y).lpNorm<Eigen::Infinity>()));
  }
}

TEST(SolveLasso, ScalarSoftThreshold) {
  const Matrix a = Matrix::Ones(1, 1);
  for (double y : {3.0, -3.0, 0.5, -0.5}) {
    const auto r = solve_lasso(a, Vector::Constant(1, y), 1.0);
    ASSERT_TRUE(r.converged);
    const double expect = y > 1.0 ? y - 1.0 : y < -1.0 ? y + 1.0 : 0.0;
    EXPECT_NEAR(r.x_hat[0], expect, 1e-12);
  }
}

TEST(SolveLasso, ZeroLambdaIsLeastSquares) {
  const Matrix a = gaussian(12, 5, 7);
  Rng rng(7, StreamTag::Signal, 0);
  const Vector y = rng.normal_vector(12);
  const auto r = solve_lasso(a, y, 0.0);
  ASSERT_TRUE(r.converged);
  const Vector ls = a.colPivHouseholderQr().solve(y);
  EXPECT_LE((r.x_hat - ls).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SolveLasso, LargeLambdaGivesZero) {
  const auto in = noisy_instance(2, 6, 12, 2, 0.1);
  const Vector y = in.a * in.x;
  const auto r = solve_lasso(in.a, y, (in.a.transpose() * y).lpNorm<Eigen::Infinity>() * 1.001);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.x_hat.lpNorm<1>(), 0.0);
}

TEST(SolveLasso, MatchesCoordinateDescentAndIsMonotone) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto in = noisy_instance(seed, 10, 20, 3, 0.1);
    const Vector y = in.a * in.x + in.w;
    const double lambda = 0.05;
    SolverConfig cfg;
    const auto r = solve_lasso(in.a, y, lambda, cfg);
    ASSERT_TRUE(r.converged) << "seed " << seed;
    EXPECT_LE(lasso_kkt_violation(in.a, y, lambda, r.x_hat), 1e-7);
    const Vector cd = oracle::lasso_coordinate_descent(in.a, y, lambda);
    EXPECT_NEAR(lasso_objective(in.a, y, lambda, r.x_hat), lasso_objective(in.a, y, lambda, cd),
                1e-9);
    EXPECT_LE((r.x_hat - cd).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(Solve, DispatchesOnNoiseModel) {
  const auto in = noisy_instance(5, 6, 12, 2, 0.1);
  const Vector y = in.a * in.x + in.w;
  const auto bp = solve(in.a, y, NoiseModel::l2_ball(0.1));
  EXPECT_NEAR(bp.x_hat.lpNorm<1>(), solve_bp(in.a, y, 0.1).x_hat.lpNorm<1>(), 1e-12);
  EXPECT_THROW(NoiseModel::lasso_pen(1.0, 1.0), Error);
  EXPECT_THROW(NoiseModel::lasso_pen(1.0, 0.0), Error);
  EXPECT_THROW(NoiseModel::l2_ball(-1.0), Error);
}

// Property: the residual h = x_hat - x of BP and DS satisfies
// ||h_{S^c}||_1 <= ||h_S||_1 and s_q(h) <= 2^{q/(q-1)} k; for the Lasso with
// ||A^T w||_inf <= kappa lambda the cone constant is (1+kappa)/(1-kappa).
// Every solver also beats the true signal on its own objective.
TEST(Recovery, ResidualConeAndMinimality) {
  const double kappa = 0.5;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(seed % 3);
    const auto in = noisy_instance(seed, 20, 40, k, 0.05);
    const Vector y = in.a * in.x + in.w;
    std::vector<bool> on(40, false);
    for (Eigen::Index i = 0; i < 40; ++i) on[static_cast<std::size_t>(i)] = in.x[i] != 0.0;
    auto cone = [&](const Vector& h) {
      double hs = 0.0, hc = 0.0;
      for (Eigen::Index i = 0; i < 40; ++i) (on[static_cast<std::size_t>(i)] ? hs : hc) += std::abs(h[i]);
      return std::make_pair(hs, hc);
    };
    const double tol = 1e-7;
    const double corr = (in.a.transpose() * in.w).lpNorm<Eigen::Infinity>();

    const auto bp = solve_bp(in.a, y, 0.05);
    ASSERT_TRUE(bp.converged);
    const auto ds = solve_ds(in.a, y, corr);
    ASSERT_TRUE(ds.converged);
    for (const Vector& xh : {bp.x_hat, ds.x_hat}) {
      EXPECT_LE(xh.lpNorm<1>(), in.x.lpNorm<1>() + 10 * tol);
      const Vector h = xh - in.x;
      const auto [hs, hc] = cone(h);
      EXPECT_LE(hc, hs + 10 * tol) << "seed " << seed;
      if (h.norm() > 1e-9) {
        EXPECT_LE(q_ratio_sparsity(h, QParam::finite(2.0)), 4.0 * static_cast<double>(k) * (1 + tol));
      }
    }

    const double lambda = corr / kappa;
    const auto lasso = solve_lasso(in.a, y, lambda);
    ASSERT_TRUE(lasso.converged);
    EXPECT_LE(lasso_objective(in.a, y, lambda, lasso.x_hat),
              lasso_objective(in.a, y, lambda, in.x) + tol);
    const auto [hs, hc] = cone(lasso.x_hat - in.x);
    EXPECT_LE(hc, (1 + kappa) / (1 - kappa) * hs + 10 * tol) << "seed " << seed;
  }
}

}  // namespace
}  // namespace qcmsv
