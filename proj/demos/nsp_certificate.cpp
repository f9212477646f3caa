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

// Certified sparsity levels for noise-free basis pursuit on a Bernoulli
// matrix: the exact q = inf verification next to CCP estimates for finite q.
// Usage: nsp_certificate [m] [N] [seed]

#include <cstdio>
#include <cstdlib>

#include "qcmsv/qcmsv.hpp"

int main(int argc, char** argv) {
  using namespace qcmsv;
  const Eigen::Index m = argc > 1 ? std::atol(argv[1]) : 24;
  const Eigen::Index n = argc > 2 ? std::atol(argv[2]) : 40;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 0;

  try {
    const auto a = generate({.kind = EnsembleTag::Bernoulli, .m = m, .n = n, .seed = seed});
    VerifyOptions opt;
    opt.seed = seed;
    const auto linf = verify_linf(a, opt);
    std::printf("%-8s %-8s %-10s %s\n", "q", "k_max", "value", "certificate");
    std::printf("%-8s %-8ld %-10.5g %s\n", "inf", long(linf.k_max), linf.opt_value,
                std::string(to_string(linf.certificate)).c_str());
    for (double qv : {1.8, 2.0, 3.0, 20.0}) {
      const auto r = ccp_verify(a, QParam::finite(qv), linf.witness, opt);
      std::printf("%-8g %-8ld %-10.5g %s\n", qv, long(r.k_max), r.opt_value,
                  std::string(to_string(r.certificate)).c_str());
    }
  } catch (const Error& ex) {
    std::fprintf(stderr, "%s\n", ex.what());
    return 1;
  }
  return 0;
}
