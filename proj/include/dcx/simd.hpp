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

#pragma once

#include <cstddef>
#include <string_view>

// Dense reduction kernels. Every variant sums in four interleaved lanes
// combined as (l0 + l1) + (l2 + l3), then adds the tail in index order, so
// the scalar and vector paths agree bit for bit.

namespace dcx::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA supported by the running CPU, unless overridden by
/// `DCX_ISA=scalar` in the environment or by `force_isa`.
Isa active_isa();
bool isa_available(Isa isa);
void force_isa(Isa isa);
void reset_isa();

struct KernelTable {
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_y j[y] * (fx - f[y]) * (hx - h[y])
  double (*gamma_row)(const double* j, const double* f, const double* h,
                      double fx, double hx, std::size_t n);
  // same, restricted to y with d[y] < eps
  double (*gamma_row_masked)(const double* j, const double* f, const double* h,
                             double fx, double hx, const double* d, double eps,
                             std::size_t n);
  // sum_y j[y] * (f[y] - fx) * (h[y] - hx) * w[y]
  double (*moment_row)(const double* j, const double* f, const double* h,
                       const double* w, double fx, double hx, std::size_t n);
};

const KernelTable& kernels();
const KernelTable& kernels(Isa isa);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();
}  // namespace detail

}  // namespace dcx::simd
