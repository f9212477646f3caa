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
#include "qcmsv/nsp.hpp"
#include "qcmsv/sparsity.hpp"
#include "test_oracles.hpp"

namespace qcmsv {
namespace {

namespace oracle = testing_oracles;

double max_lq_over_kernel_slice(const Matrix& a, const QParam& q) {
  double best = 0.0;
  for (const Vector& z : oracle::l1_slice_vertices(a, Vector::Zero(a.rows()), 1.0)) {
    best = std::max(best, lq_norm(z, q));
  }
  return best;
}

TEST(StrictFloor, Cases) {
  EXPECT_EQ(strict_floor(1.0, 10), 0);
  EXPECT_EQ(strict_floor(1.0 + 1e-12, 10), 0);
  EXPECT_EQ(strict_floor(2.5, 10), 2);
  EXPECT_EQ(strict_floor(3.0 - 1e-12, 10), 2);
  EXPECT_EQ(strict_floor(0.3, 10), 0);
  EXPECT_EQ(strict_floor(0.0, 10), 0);
  EXPECT_EQ(strict_floor(50.0, 10), 10);
  EXPECT_EQ(strict_floor(std::numeric_limits<double>::infinity(), 10), 10);
}

TEST(SparsityBound, Values) {
  EXPECT_DOUBLE_EQ(sparsity_bound(QParam::infinity(), 0.25), 2.0);
  // q = 2: 2^{-2} (1/opt)^2.
  EXPECT_DOUBLE_EQ(sparsity_bound(QParam::finite(2.0), 0.25), 4.0);
  EXPECT_THROW(sparsity_bound(QParam::one(), 0.5), Error);
}

TEST(VerifyLinf, TwoColumnsOfOnes) {
  Matrix a(1, 2);
  a << 1, 1;
  const auto r = verify_linf(MeasurementMatrix(a));
  EXPECT_NEAR(r.opt_value, 0.5, 1e-12);
  EXPECT_EQ(r.k_max, 0);
  EXPECT_EQ(r.certificate, Certificate::Exact);
}

TEST(VerifyLinf, InvertibleMatrixRecoversEverything) {
  const auto a = generate({EnsembleTag::Gaussian, 5, 5, 3});
  const auto r = verify_linf(a);
  EXPECT_EQ(r.k_max, 5);
  EXPECT_EQ(r.certificate, Certificate::Exact);
  EXPECT_EQ(ccp_verify(a, QParam::finite(2.0)).k_max, 5);
}

TEST(VerifyLinf, MatchesVertexEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = generate({EnsembleTag::Gaussian, 3, 6, seed});
    const auto r = verify_linf(a);
    const double expect = max_lq_over_kernel_slice(a.entries(), QParam::infinity());
    EXPECT_NEAR(r.opt_value, expect, 1e-9) << "seed " << seed;
    EXPECT_NEAR((a.entries() * r.witness).norm(), 0.0, 1e-9);
    EXPECT_LE(r.witness.lpNorm<1>(), 1.0 + 1e-9);
  }
}

TEST(VerifyLinf, ThreadCountDoesNotChangeResult) {
  const auto a = generate({EnsembleTag::Bernoulli, 12, 20, 1, std::nullopt, std::nullopt, true});
  VerifyOptions one;
  VerifyOptions four;
  four.threads = 4;
  EXPECT_EQ(verify_linf(a, one).opt_value, verify_linf(a, four).opt_value);
}

TEST(CcpVerify, NeverExceedsVertexOptimum) {
  // CCP stops at a local vertex now and then; it must never pass the true
  // maximum and should land close to it.
  int exact_hits = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = generate({EnsembleTag::Gaussian, 3, 6, seed});
    for (double q : {1.8, 2.0, 3.0}) {
      const QParam qp = QParam::finite(q);
      const auto r = ccp_verify(a, qp);
      const double expect = max_lq_over_kernel_slice(a.entries(), qp);
      EXPECT_LE(r.opt_value, expect * (1 + 1e-9));
      EXPECT_GE(r.opt_value, 0.95 * expect) << "seed " << seed << " q " << q;
      if (r.opt_value >= expect * (1 - 1e-9)) ++exact_hits;
      EXPECT_EQ(r.certificate, Certificate::HeuristicUpper);
    }
  }
  EXPECT_GE(exact_hits, 15);
}

TEST(CcpVerify, TraceIsNonDecreasing) {
  const auto a = generate({EnsembleTag::Bernoulli, 16, 24, 2, std::nullopt, std::nullopt, true});
  const auto r = ccp_verify(a, QParam::finite(2.0));
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1]);
}

TEST(CcpVerify, NoWorseThanLinfWitness) {
  // ||z||_q >= ||z||_inf and CCP starts from the linf witness.
  const auto a = generate({EnsembleTag::Bernoulli, 16, 24, 5, std::nullopt, std::nullopt, true});
  const auto linf = verify_linf(a);
  const auto ccp = ccp_verify(a, QParam::finite(20.0));
  EXPECT_GE(ccp.opt_value, 0.0);
  EXPECT_LE(ccp.opt_value, 1.0);
  EXPECT_GE(lq_norm(ccp.witness, QParam::finite(20.0)), linf.opt_value - 1e-9);
}

TEST(CcpVerify, ExplicitStartIsChecked) {
  const auto a = generate({EnsembleTag::Gaussian, 3, 6, 0});
  EXPECT_THROW(ccp_verify(a, QParam::finite(2.0), Vector::Ones(6)), Error);
  const auto r = ccp_verify(a, QParam::finite(2.0), Vector::Zero(6));
  EXPECT_GT(r.opt_value, 0.0);
}

TEST(MaxRecoverableSparsity, Dispatch) {
  const auto a = generate({EnsembleTag::Gaussian, 3, 6, 0});
  EXPECT_THROW(max_recoverable_sparsity(a, QParam::finite(2.0), VerifyMethod::Linf), Error);
  EXPECT_EQ(max_recoverable_sparsity(a, QParam::infinity(), VerifyMethod::Ccp),
            verify_linf(a).k_max);
  EXPECT_THROW(ccp_verify(a, QParam::infinity()), Error);
}

}  // namespace
}  // namespace qcmsv
