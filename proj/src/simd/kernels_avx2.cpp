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

#include "dcx/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define DCX_HAVE_AVX2_TU 1
#include <immintrin.h>
#endif

namespace dcx::simd {

#if defined(DCX_HAVE_AVX2_TU)
namespace {

#define DCX_AVX2 __attribute__((target("avx2")))

DCX_AVX2 inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

DCX_AVX2 double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

DCX_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, t);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double t = a[i] * b[i];
    s += t;
  }
  return s;
}

DCX_AVX2 inline __m256d gamma_lanes(const double* j, const double* f,
                                    const double* h, __m256d fx, __m256d hx,
                                    std::size_t i) {
  __m256d df = _mm256_sub_pd(fx, _mm256_loadu_pd(f + i));
  __m256d dh = _mm256_sub_pd(hx, _mm256_loadu_pd(h + i));
  __m256d t = _mm256_mul_pd(_mm256_loadu_pd(j + i), df);
  return _mm256_mul_pd(t, dh);
}

inline double gamma_tail(const double* j, const double* f, const double* h,
                         double fx, double hx, std::size_t y) {
  double df = fx - f[y];
  double dh = hx - h[y];
  double t = j[y] * df;
  return t * dh;
}

DCX_AVX2 double gamma_row_avx2(const double* j, const double* f,
                               const double* h, double fx, double hx,
                               std::size_t n) {
  __m256d vf = _mm256_set1_pd(fx);
  __m256d vh = _mm256_set1_pd(hx);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, gamma_lanes(j, f, h, vf, vh, i));
  double s = hsum(acc);
  for (; i < n; ++i) s += gamma_tail(j, f, h, fx, hx, i);
  return s;
}

DCX_AVX2 double gamma_row_masked_avx2(const double* j, const double* f,
                                      const double* h, double fx, double hx,
                                      const double* d, double eps,
                                      std::size_t n) {
  __m256d vf = _mm256_set1_pd(fx);
  __m256d vh = _mm256_set1_pd(hx);
  __m256d ve = _mm256_set1_pd(eps);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = gamma_lanes(j, f, h, vf, vh, i);
    __m256d m = _mm256_cmp_pd(_mm256_loadu_pd(d + i), ve, _CMP_LT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(m, t));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double t = gamma_tail(j, f, h, fx, hx, i);
    s += d[i] < eps ? t : 0.0;
  }
  return s;
}

DCX_AVX2 double moment_row_avx2(const double* j, const double* f,
                                const double* h, const double* w, double fx,
                                double hx, std::size_t n) {
  __m256d vf = _mm256_set1_pd(fx);
  __m256d vh = _mm256_set1_pd(hx);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d df = _mm256_sub_pd(_mm256_loadu_pd(f + i), vf);
    __m256d dh = _mm256_sub_pd(_mm256_loadu_pd(h + i), vh);
    __m256d t = _mm256_mul_pd(_mm256_loadu_pd(j + i), df);
    t = _mm256_mul_pd(t, dh);
    t = _mm256_mul_pd(t, _mm256_loadu_pd(w + i));
    acc = _mm256_add_pd(acc, t);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double df = f[i] - fx;
    double dh = h[i] - hx;
    double t = j[i] * df;
    t = t * dh;
    s += t * w[i];
  }
  return s;
}

#undef DCX_AVX2

}  // namespace
#endif

namespace detail {

const KernelTable* avx2_table() {
#if defined(DCX_HAVE_AVX2_TU)
  static const KernelTable table{sum_avx2, dot_avx2, gamma_row_avx2,
                                 gamma_row_masked_avx2, moment_row_avx2};
  return &table;
#else
  return nullptr;
#endif
}

}  // namespace detail
}  // namespace dcx::simd
