// Copyright (c) 2026 The dcx Authors. All Rights Reserved.
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

#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "dcx/simd.hpp"

using namespace dcx::simd;

namespace {

std::vector<double> sample_data(std::mt19937_64& rng, std::size_t n, double lo = -3.0,
                                double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("environment override") {
  const char* env = std::getenv("DCX_ISA");
  if (env != nullptr && std::string(env) == "scalar") {
    CHECK(active_isa() == Isa::scalar);
    CHECK(&kernels() == &detail::scalar_table());
  }
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("forcing the isa") {
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  CHECK(&kernels() == &detail::scalar_table());
  if (isa_available(Isa::avx2)) {
    force_isa(Isa::avx2);
    CHECK(active_isa() == Isa::avx2);
    CHECK(&kernels() == detail::avx2_table());
  } else {
    force_isa(Isa::avx2);
    CHECK(active_isa() == Isa::scalar);
  }
  reset_isa();
}

TEST_CASE("scalar and avx2 agree bit for bit") {
  const KernelTable* v = detail::avx2_table();
  if (v == nullptr || !isa_available(Isa::avx2)) {
    MESSAGE("avx2 not available on this machine");
    return;
  }
  const KernelTable& s = detail::scalar_table();
  std::mt19937_64 rng(99);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 101u, 1000u}) {
    auto a = sample_data(rng, n);
    auto b = sample_data(rng, n);
    auto c = sample_data(rng, n);
    auto w = sample_data(rng, n, 0.0, 2.0);
    auto d = sample_data(rng, n, 0.0, 1.0);
    auto j = sample_data(rng, n, 0.0, 1.0);
    CHECK(same_bits(s.sum(a.data(), n), v->sum(a.data(), n)));
    CHECK(same_bits(s.dot(a.data(), b.data(), n), v->dot(a.data(), b.data(), n)));
    CHECK(same_bits(s.gamma_row(j.data(), a.data(), b.data(), 0.3, -1.1, n),
                    v->gamma_row(j.data(), a.data(), b.data(), 0.3, -1.1, n)));
    for (double eps : {0.0, 0.25, 0.5, 2.0}) {
      CHECK(same_bits(s.gamma_row_masked(j.data(), a.data(), c.data(), 0.7, 0.2, d.data(), eps, n),
                      v->gamma_row_masked(j.data(), a.data(), c.data(), 0.7, 0.2, d.data(), eps, n)));
    }
    CHECK(same_bits(s.moment_row(j.data(), a.data(), b.data(), w.data(), 0.1, 0.4, n),
                    v->moment_row(j.data(), a.data(), b.data(), w.data(), 0.1, 0.4, n)));
  }
}

TEST_CASE("scalar kernels match plain loops") {
  const KernelTable& s = detail::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 3u, 13u, 200u}) {
    auto a = sample_data(rng, n);
    auto b = sample_data(rng, n);
    auto d = sample_data(rng, n, 0.0, 1.0);
    auto j = sample_data(rng, n, 0.0, 1.0);
    double sum = 0, dot = 0, g = 0, gm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += a[i];
      dot += a[i] * b[i];
      g += j[i] * (0.5 - a[i]) * (0.2 - b[i]);
      if (d[i] < 0.6) gm += j[i] * (0.5 - a[i]) * (0.2 - b[i]);
    }
    CHECK(s.sum(a.data(), n) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(s.gamma_row(j.data(), a.data(), b.data(), 0.5, 0.2, n) == doctest::Approx(g).epsilon(1e-12));
    CHECK(s.gamma_row_masked(j.data(), a.data(), b.data(), 0.5, 0.2, d.data(), 0.6, n) ==
          doctest::Approx(gm).epsilon(1e-12));
  }
}

}  // TEST_SUITE
