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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "dcx/simd.hpp"

namespace dcx::simd {
namespace {

// -1 = not forced
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  const char* env = std::getenv("DCX_ISA");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  if (cpu_has_avx2() && detail::avx2_table() != nullptr) return Isa::avx2;
  return Isa::scalar;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
    default:
      return "scalar";
  }
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return cpu_has_avx2() && detail::avx2_table() != nullptr;
}

Isa active_isa() {
  int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::scalar;
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

const KernelTable& kernels(Isa isa) {
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return *detail::avx2_table();
  return detail::scalar_table();
}

const KernelTable& kernels() { return kernels(active_isa()); }

}  // namespace dcx::simd
