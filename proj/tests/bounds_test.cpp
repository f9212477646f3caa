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

#include "qcmsv/bounds.hpp"
#include "qcmsv/ric.hpp"

namespace qcmsv {
namespace {

const QParam kTwo = QParam::finite(2.0);

CmsvEstimate rho_at(double value, double s, QParam q = kTwo, Eigen::Index n = 40) {
  CmsvEstimate e;
  e.value = value;
  e.s = s;
  e.q = q;
  e.minimizer = Vector::Zero(n);
  return e;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

TEST(RequiredS, Constants) {
  EXPECT_DOUBLE_EQ(required_cmsv_s(BoundRegime::ExactSparse, NoiseModel::l2_ball(1), 3, kTwo), 12.0);
  EXPECT_DOUBLE_EQ(required_cmsv_s(BoundRegime::Compressible, NoiseModel::l2_ball(1), 1, kTwo), 16.0);
  EXPECT_DOUBLE_EQ(required_cmsv_s(BoundRegime::ExactSparse, NoiseModel::lasso_pen(1, 0.5), 1, kTwo),
                   16.0);
  EXPECT_DOUBLE_EQ(
      required_cmsv_s(BoundRegime::ExactSparse, NoiseModel::l2_ball(1), 3, QParam::infinity()), 6.0);
  EXPECT_DOUBLE_EQ(cmsv_s_for(BoundRegime::Compressible, NoiseModel::l2_ball(1), 5, kTwo, 40), 40.0);
}

TEST(SparseSignalBound, ZeroNoiseGivesZero) {
  const auto r = bound_theorem1(rho_at(0.3, 4.0), 1, kTwo, NoiseModel::l2_ball(0.0));
  EXPECT_EQ(r.bound_lq, 0.0);
  EXPECT_EQ(r.bound_l1, 0.0);
}

TEST(SparseSignalBound, BasisPursuitValues) {
  const auto r = bound_theorem1(rho_at(0.5, 8.0), 2, kTwo, NoiseModel::l2_ball(1.0));
  EXPECT_DOUBLE_EQ(r.bound_lq, 4.0);
  EXPECT_NEAR(r.bound_l1, 8.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(r.regime, BoundRegime::ExactSparse);
  ASSERT_EQ(r.caveat_flags.size(), 1u);
  EXPECT_EQ(r.caveat_flags[0], "RHO_UPPER_BOUND");
}

TEST(SparseSignalBound, DantzigValues) {
  const auto r = bound_theorem1(rho_at(1.0, 4.0), 1, kTwo, NoiseModel::correlated_inf(1.0));
  EXPECT_DOUBLE_EQ(r.bound_lq, 4.0);
  EXPECT_DOUBLE_EQ(r.bound_l1, 8.0);
}

TEST(SparseSignalBound, LassoValues) {
  // (1+k)/(1-k) * 2 / rho^2 and (1+k)/(1-k)^2 * 4 / rho^2 with kappa = 1/2.
  const auto r = bound_theorem1(rho_at(1.0, 16.0), 1, kTwo, NoiseModel::lasso_pen(1.0, 0.5));
  EXPECT_DOUBLE_EQ(r.bound_lq, 6.0);
  EXPECT_DOUBLE_EQ(r.bound_l1, 24.0);
}

TEST(SparseSignalBound, InfinityOrder) {
  const auto r = bound_theorem1(rho_at(0.5, 6.0, QParam::infinity()), 3, QParam::infinity(),
                                NoiseModel::l2_ball(1.0));
  EXPECT_DOUBLE_EQ(r.bound_lq, 4.0);
  EXPECT_DOUBLE_EQ(r.bound_l1, 24.0);
}

TEST(SparseSignalBound, Errors) {
  EXPECT_EQ(code_of([] { bound_theorem1(rho_at(0.5, 3.0), 1, kTwo, NoiseModel::l2_ball(1)); }),
            ErrorCode::SMismatch);
  EXPECT_EQ(code_of([] { bound_theorem1(rho_at(0.0, 4.0), 1, kTwo, NoiseModel::l2_ball(1)); }),
            ErrorCode::NotApplicable);
  EXPECT_EQ(code_of([] {
              bound_theorem1(rho_at(0.5, 4.0, QParam::finite(3.0)), 1, kTwo, NoiseModel::l2_ball(1));
            }),
            ErrorCode::InvalidQ);
  EXPECT_EQ(code_of([] { bound_theorem1(rho_at(0.5, 4.0), 0, kTwo, NoiseModel::l2_ball(1)); }),
            ErrorCode::InvalidArgument);
}

TEST(SparseSignalBound, ClampedS) {
  // Lasso k = 3 needs s = 48 > N = 40; rho at s = N is accepted and flagged.
  const auto r = bound_theorem1(rho_at(0.2, 40.0), 3, kTwo, NoiseModel::lasso_pen(0.1, 0.5));
  EXPECT_NE(std::find(r.caveat_flags.begin(), r.caveat_flags.end(), "S_CLAMPED_TO_N"),
            r.caveat_flags.end());
}

TEST(CompressibleSignalBound, ZeroDefectReducesToSparseForm) {
  const auto t2 = bound_theorem2(rho_at(0.5, 16.0), 1, kTwo, NoiseModel::l2_ball(1.0), 0.0);
  EXPECT_DOUBLE_EQ(t2.bound_lq, 4.0);
  EXPECT_DOUBLE_EQ(t2.bound_l1, 8.0);
}

TEST(CompressibleSignalBound, DefectOnlyValues) {
  const auto bp = bound_theorem2(rho_at(1.0, 16.0), 1, kTwo, NoiseModel::l2_ball(0.0), 3.0);
  EXPECT_DOUBLE_EQ(bp.bound_lq, 3.0);
  EXPECT_DOUBLE_EQ(bp.bound_l1, 12.0);
  const auto lasso =
      bound_theorem2(rho_at(1.0, 64.0, kTwo, 80), 1, kTwo, NoiseModel::lasso_pen(0.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(lasso.bound_l1, 8.0);
  EXPECT_EQ(lasso.regime, BoundRegime::Compressible);
}

TEST(CompressibleSignalBound, MaxFormNeverExceedsSum) {
  for (double eps : {0.0, 0.1, 1.0, 5.0}) {
    for (double sk : {0.0, 0.5, 2.0}) {
      for (const auto& noise : {NoiseModel::l2_ball(eps), NoiseModel::correlated_inf(eps),
                                NoiseModel::lasso_pen(eps, 0.3)}) {
        const double s = required_cmsv_s(BoundRegime::Compressible, noise, 2, kTwo);
        const auto r = bound_theorem2(rho_at(0.4, s, kTwo, 200), 2, kTwo, noise, sk);
        EXPECT_LE(r.bound_lq_max, r.bound_lq * (1 + 1e-15));
        EXPECT_LE(r.bound_l1_max, r.bound_l1 * (1 + 1e-15));
        EXPECT_GE(r.bound_lq_max, 0.0);
      }
    }
  }
}

TEST(RicBound, Values) {
  EXPECT_DOUBLE_EQ(*ric_bound(0.0, 1, 2.0, 1.0), 4.0);
  const double c = 4.0 * std::sqrt(1.2) / (1.0 - (1.0 + std::sqrt(2.0)) * 0.2);
  EXPECT_NEAR(*ric_bound(0.2, 2, 2.0, 1.0), c, 1e-12);
  EXPECT_NEAR(c, 8.4728, 1e-4);
  for (std::int64_t k : {1, 2, 4}) {
    EXPECT_NEAR(*ric_bound(0.0, k, 1.8, 1.0), 4.0 * std::pow(k, 1.0 / 1.8 - 0.5), 1e-12);
  }
  EXPECT_FALSE(ric_bound(std::sqrt(2.0) - 1.0, 1, 2.0, 1.0).has_value());
  EXPECT_THROW(ric_bound(0.1, 1, 2.5, 1.0), Error);
  EXPECT_THROW(ric_bound(0.1, 1, 0.9, 1.0), Error);
}

TEST(RicBound, StrictlyIncreasingInDelta) {
  double prev = 0.0;
  for (double d = 0.0; d < std::sqrt(2.0) - 1.0; d += 0.01) {
    const double v = *ric_bound(d, 2, 1.8, 1.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

}  // namespace
}  // namespace qcmsv
