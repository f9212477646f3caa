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

#include <gtest/gtest.h>

#include "qcmsv/ensembles.hpp"
#include "qcmsv/ric.hpp"
#include "test_oracles.hpp"

namespace qcmsv {
namespace {

MeasurementMatrix unit_gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  return generate({EnsembleTag::Gaussian, m, n, seed, std::nullopt, std::nullopt, true});
}

TEST(EstimateRic, OrthonormalColumnsGiveZero) {
  const MeasurementMatrix eye(Matrix::Identity(8, 8));
  const auto est = estimate_ric(eye, 2, 200);
  EXPECT_EQ(est.delta, 0.0);
  EXPECT_EQ(est.direction, EstimateDirection::LowerBound);
  const auto h = generate({EnsembleTag::HadamardSub, 16, 16, 3});
  EXPECT_LE(estimate_ric(h, 3, 100).delta, 1e-12);
}

TEST(EstimateRic, ExhaustiveOracleDominates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = unit_gaussian(6, 8, seed);
    for (std::int64_t k : {1, 2}) {
      const double exact = testing_oracles::exact_ric(a.entries(), static_cast<int>(2 * k));
      const auto est = estimate_ric(a, k, 50, seed);
      EXPECT_LE(est.delta, exact + 1e-10);
      // Enough draws to hit every one of the C(8,2) = 28 pairs.
      if (k == 1) {
        EXPECT_NEAR(estimate_ric(a, k, 2000, seed).delta, exact, 1e-10);
      }
    }
  }
}

TEST(EstimateRic, NestedInSamplesAndK) {
  const auto a = unit_gaussian(20, 40, 4);
  double prev = 0.0;
  for (std::int64_t n : {10, 50, 200}) {
    const double d = estimate_ric(a, 2, n, 7).delta;
    EXPECT_GE(d, prev);
    prev = d;
  }
  prev = 0.0;
  for (std::int64_t k : {1, 2, 3, 4}) {
    const double d = estimate_ric(a, k, 100, 7).delta;
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(EstimateRic, DeterministicAndThreadIndependent) {
  const auto a = unit_gaussian(12, 24, 1);
  EXPECT_EQ(estimate_ric(a, 2, 100, 5, 1).delta, estimate_ric(a, 2, 100, 5, 4).delta);
  EXPECT_EQ(estimate_ric(a, 2, 100, 5).delta, estimate_ric(a, 2, 100, 5).delta);
}

TEST(EstimateRic, DegenerateAndInvalid) {
  const auto a = unit_gaussian(3, 10, 2);
  const auto est = estimate_ric(a, 2, 10);
  EXPECT_TRUE(est.degenerate);
  EXPECT_GE(est.delta, 1.0);
  EXPECT_THROW(estimate_ric(a, 6, 10), Error);
  EXPECT_THROW(estimate_ric(a, 0, 10), Error);
  EXPECT_FALSE(estimate_ric(generate({EnsembleTag::Gaussian, 3, 10, 2}), 1, 10).unit_columns);
}

}  // namespace
}  // namespace qcmsv
