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

// Draws a Bernoulli matrix and a k-sparse signal, recovers it from noisy
// measurements with basis pursuit, and compares the actual error with the
// CMSV bound. Usage: noisy_recovery [m] [N] [k] [seed]

#include <cstdio>
#include <cstdlib>

#include "qcmsv/qcmsv.hpp"

int main(int argc, char** argv) {
  using namespace qcmsv;
  const Eigen::Index m = argc > 1 ? std::atol(argv[1]) : 40;
  const Eigen::Index n = argc > 2 ? std::atol(argv[2]) : 80;
  const std::int64_t k = argc > 3 ? std::atol(argv[3]) : 2;
  const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;
  const double eps = 0.05;

  try {
    EnsembleSpec spec{.kind = EnsembleTag::Bernoulli, .m = m, .n = n, .seed = seed};
    spec.normalize_columns = true;
    const MeasurementMatrix a = generate(spec);

    Rng sig(seed, StreamTag::Signal);
    Vector x = Vector::Zero(n);
    for (Eigen::Index i : sig.partial_permutation(n, k)) x[i] = sig.normal();
    Rng noise(seed, StreamTag::Noise);
    Vector e = noise.normal_vector(m);
    e *= eps / e.norm();
    const Vector y = a.entries() * x + e;

    const auto r = solve_bp(a.entries(), y, eps);
    const double err2 = (r.x_hat - x).norm();
    const double err1 = (r.x_hat - x).lpNorm<1>();

    const QParam q = QParam::finite(2.0);
    const NoiseModel model = NoiseModel::l2_ball(eps);
    CmsvRequest req;
    req.a = a;
    req.q = q;
    req.s = cmsv_s_for(BoundRegime::ExactSparse, model, k, q, n);
    req.seed = seed;
    const auto rho = estimate_cmsv(req);
    const auto b = bound_theorem1(rho, k, q, model);

    std::printf("A: %ldx%ld Bernoulli, k = %ld, eps = %g\n", long(m), long(n), long(k), eps);
    std::printf("basis pursuit: %s after %d iterations\n", r.converged ? "converged" : "stopped",
                r.iterations);
    std::printf("rho_{2,%g} = %.6g\n", rho.s, rho.value);
    std::printf("l2 error %.4g <= bound %.4g\n", err2, b.bound_lq);
    std::printf("l1 error %.4g <= bound %.4g\n", err1, b.bound_l1);
  } catch (const Error& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 1;
  }
  return 0;
}
