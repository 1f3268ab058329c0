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

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dcx/cli/experiments.hpp"
#include "dcx/kas.hpp"
#include "dcx/parallel.hpp"

namespace dcx::cli {
namespace {

using Q = mpq_class;
using MF = kas::MultiFunction<Q>;
using Fn = std::vector<Q>;
using kas::Tuple;

Q random_rational(Rng& rng) {
  std::uniform_int_distribution<long> num(-6, 6);
  std::uniform_int_distribution<long> den(1, 4);
  Q q(num(rng));
  q /= Q(den(rng));
  return q;
}

Fn random_fn(Rng& rng, std::size_t n) {
  Fn f(n);
  for (auto& v : f) v = random_rational(rng);
  return f;
}

MF random_mf(Rng& rng, std::size_t n, std::size_t arity) {
  MF f(n, arity);
  for (std::size_t k = 0; k < f.flat_size(); ++k) f.at_flat(k) = random_rational(rng);
  return f;
}

/// Largest n <= 8 with n^arity <= cap.
std::size_t grid_for(std::size_t arity, std::size_t cap = 20000) {
  std::size_t n = 8;
  while (n > 2) {
    std::size_t s = 1;
    for (std::size_t i = 0; i < arity; ++i) s *= n;
    if (s <= cap) break;
    --n;
  }
  return n;
}

bool is_zero(const MF& f) {
  for (const auto& v : f.values()) {
    if (v != 0) return false;
  }
  return true;
}

bool same(const MF& a, const MF& b) {
  return a.arity() == b.arity() && a.n() == b.n() && a.values() == b.values();
}

MF tensor(const std::vector<Fn>& fs) { return MF::tensor(fs); }

Fn product(const Fn& a, const Fn& b) {
  Fn out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

/// (f (x) F)(x0, x1..xk) = f(x0) F(x1..xk)
MF prepend(const Fn& f, const MF& g) {
  MF out(g.n(), g.arity() + 1);
  for (std::size_t k = 0; k < out.flat_size(); ++k) {
    Tuple t = out.unflat(k);
    Tuple rest(t.begin() + 1, t.end());
    out.at_flat(k) = f[t[0]] * g[rest];
  }
  return out;
}

/// gbar(x0..xk) F(x0..xk)
MF times_mean(const Fn& g, const MF& f) {
  MF out(f.n(), f.arity());
  const Q k(static_cast<long>(f.arity()));
  for (std::size_t i = 0; i < out.flat_size(); ++i) {
    Tuple t = out.unflat(i);
    Q m(0);
    for (std::size_t x : t) m += g[x];
    out.at_flat(i) = m / k * f.at_flat(i);
  }
  return out;
}

MF elementary(const Fn& g, const std::vector<Fn>& fs, std::size_t n) {
  MF out(n, fs.size() + 1);
  for (std::size_t k = 0; k < out.flat_size(); ++k) {
    out.at_flat(k) = kas::eval_elementary_exact(g, fs, out.unflat(k));
  }
  return out;
}

std::vector<Fn> random_fns(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<Fn> fs;
  for (std::size_t i = 0; i < p; ++i) fs.push_back(random_fn(rng, n));
  return fs;
}

using Suite = std::function<bool(Rng&)>;

struct NamedSuite {
  std::string name;
  Suite run;
};

std::size_t degree(Rng& rng) { return std::uniform_int_distribution<std::size_t>(1, 3)(rng); }

std::vector<NamedSuite> suites() {
  std::vector<NamedSuite> out;
  out.push_back({"delta_delta_zero", [](Rng& rng) {
                   std::size_t k = degree(rng);
                   std::size_t n = grid_for(k + 2);
                   MF f = random_mf(rng, n, k);
                   return is_zero(kas::coboundary(kas::coboundary(f)));
                 }});
  out.push_back({"delta_alt_commute", [](Rng& rng) {
                   std::size_t k = degree(rng);
                   std::size_t n = grid_for(k + 1);
                   MF f = random_mf(rng, n, k);
                   return same(kas::coboundary(kas::alt(f)), kas::alt(kas::coboundary(f)));
                 }});
  out.push_back({"delta_alt_tensor", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 1);
                   auto fs = random_fns(rng, n, p);
                   MF lhs = kas::coboundary(kas::alt(tensor(fs)));
                   std::vector<Fn> withone = {Fn(n, Q(1))};
                   withone.insert(withone.end(), fs.begin(), fs.end());
                   MF rhs = kas::alt(tensor(withone)) * Q(static_cast<long>(p + 1));
                   return same(lhs, rhs);
                 }});
  out.push_back({"determinant", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 1);
                   auto fs = random_fns(rng, n, p);
                   MF lhs = kas::coboundary(kas::alt(tensor(fs)));
                   return same(lhs, elementary(Fn(n, Q(1)), fs, n));
                 }});
  out.push_back({"pullout", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 1);
                   auto fs = random_fns(rng, n, p + 1);
                   MF lhs = kas::alt(tensor(fs));
                   MF rhs(n, p + 1);
                   for (std::size_t l = 0; l <= p; ++l) {
                     std::vector<Fn> rest;
                     for (std::size_t i = 0; i <= p; ++i) {
                       if (i != l) rest.push_back(fs[i]);
                     }
                     MF term = prepend(fs[l], kas::alt(tensor(rest)));
                     if (l % 2 == 0) {
                       rhs += term;
                     } else {
                       rhs -= term;
                     }
                   }
                   rhs *= Q(1) / Q(static_cast<long>(p + 1));
                   return same(lhs, rhs);
                 }});
  out.push_back({"delta_act0", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 1);
                   Fn g = random_fn(rng, n);
                   auto fs = random_fns(rng, n, p);
                   MF lhs = times_mean(g, kas::coboundary(kas::alt(tensor(fs))));
                   std::vector<Fn> gf = {g};
                   gf.insert(gf.end(), fs.begin(), fs.end());
                   MF rhs = kas::alt(tensor(gf));
                   for (std::size_t k = 0; k < p; ++k) {
                     std::vector<Fn> v = {Fn(n, Q(1))};
                     for (std::size_t i = 0; i < p; ++i) v.push_back(i == k ? product(fs[i], g) : fs[i]);
                     rhs += kas::alt(tensor(v));
                   }
                   return same(lhs, rhs);
                 }});
  out.push_back({"delta_act", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 2);
                   Fn g = random_fn(rng, n);
                   auto fs = random_fns(rng, n, p);
                   MF lhs = kas::coboundary(times_mean(g, kas::coboundary(kas::alt(tensor(fs)))));
                   std::vector<Fn> gf = {g};
                   gf.insert(gf.end(), fs.begin(), fs.end());
                   return same(lhs, kas::coboundary(kas::alt(tensor(gf))));
                 }});
  out.push_back({"elementary_coboundary", [](Rng& rng) {
                   std::size_t p = degree(rng);
                   std::size_t n = grid_for(p + 2, 3000);
                   Fn g = random_fn(rng, n);
                   auto fs = random_fns(rng, n, p);
                   std::vector<Fn> gf = {g};
                   gf.insert(gf.end(), fs.begin(), fs.end());
                   return same(kas::coboundary(elementary(g, fs, n)), elementary(Fn(n, Q(1)), gf, n));
                 }});
  return out;
}

}  // namespace

Report run_identities(std::uint64_t seed, std::size_t count, const RunOptions& opts) {
  Report r;
  r.experiment = "identities";
  r.columns = {"suite", "fixtures", "failures", "ms"};
  r.seed = seed;
  r.config = {{"count", std::to_string(count)}};
  const auto all = suites();
  for (std::size_t s = 0; s < all.size(); ++s) {
    auto start = std::chrono::steady_clock::now();
    std::vector<char> ok(count, 0);
    parallel_for(count, [&](std::size_t i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i)};
      Rng rng(seq);
      ok[i] = all[s].run(rng) ? 1 : 0;
    });
    long failures = 0;
    for (char c : ok) failures += c ? 0 : 1;
    double ms = opts.timing
                    ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                    : 0.0;
    r.rows.push_back({all[s].name, static_cast<long>(count), failures, ms});
    r.add_check(all[s].name, failures == 0, std::to_string(failures) + " failures");
  }
  return r;
}

}  // namespace dcx::cli
