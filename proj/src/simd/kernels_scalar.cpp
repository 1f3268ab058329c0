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

namespace dcx::simd {
namespace {

inline double combine(const double* acc) {
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_scalar(const double* a, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += a[i + l];
  }
  double s = combine(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      double t = a[i + l] * b[i + l];
      acc[l] += t;
    }
  }
  double s = combine(acc);
  for (; i < n; ++i) {
    double t = a[i] * b[i];
    s += t;
  }
  return s;
}

inline double gamma_term(const double* j, const double* f, const double* h,
                         double fx, double hx, std::size_t y) {
  double df = fx - f[y];
  double dh = hx - h[y];
  double t = j[y] * df;
  return t * dh;
}

double gamma_row_scalar(const double* j, const double* f, const double* h,
                        double fx, double hx, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += gamma_term(j, f, h, fx, hx, i + l);
  }
  double s = combine(acc);
  for (; i < n; ++i) s += gamma_term(j, f, h, fx, hx, i);
  return s;
}

double gamma_row_masked_scalar(const double* j, const double* f,
                               const double* h, double fx, double hx,
                               const double* d, double eps, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      double t = gamma_term(j, f, h, fx, hx, i + l);
      acc[l] += d[i + l] < eps ? t : 0.0;
    }
  }
  double s = combine(acc);
  for (; i < n; ++i) {
    double t = gamma_term(j, f, h, fx, hx, i);
    s += d[i] < eps ? t : 0.0;
  }
  return s;
}

inline double moment_term(const double* j, const double* f, const double* h,
                          const double* w, double fx, double hx,
                          std::size_t y) {
  double df = f[y] - fx;
  double dh = h[y] - hx;
  double t = j[y] * df;
  t = t * dh;
  return t * w[y];
}

double moment_row_scalar(const double* j, const double* f, const double* h,
                         const double* w, double fx, double hx,
                         std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += moment_term(j, f, h, w, fx, hx, i + l);
  }
  double s = combine(acc);
  for (; i < n; ++i) s += moment_term(j, f, h, w, fx, hx, i);
  return s;
}

}  // namespace

namespace detail {

const KernelTable& scalar_table() {
  static const KernelTable table{sum_scalar, dot_scalar, gamma_row_scalar,
                                 gamma_row_masked_scalar, moment_row_scalar};
  return table;
}

}  // namespace detail
}  // namespace dcx::simd
