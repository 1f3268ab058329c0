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

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "dcx/cli/experiments.hpp"
#include "dcx/error.hpp"
#include "dcx/mms.hpp"
#include "dcx/spaces/torus.hpp"

using namespace dcx;
using namespace dcx::spaces;
using kas::ElementaryCochain;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-12, std::abs(b)); }

double sup_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("torus") {

TEST_CASE("trig polynomial algebra") {
  TrigPoly s = TrigPoly::sin_mode({1, 0});
  TrigPoly c = TrigPoly::cos_mode({1, 0});
  CHECK(s.evaluate(0.25) == doctest::Approx(1.0));
  CHECK(c.evaluate(0.5) == doctest::Approx(-1.0));
  TrigPoly ss = s * s;
  TrigPoly expect = TrigPoly::constant(0.5) - TrigPoly::cos_mode({2, 0}, 0.5);
  for (double x : {0.0, 0.1, 0.37, 0.8}) CHECK(ss.evaluate(x) == doctest::Approx(expect.evaluate(x)));
  CHECK(ss.mean() == doctest::Approx(0.5));
  CHECK((s * c).mean() == doctest::Approx(0.0));
  TrigPoly ds = s.derivative(0);
  for (double x : {0.0, 0.2, 0.9}) CHECK(ds.evaluate(x) == doctest::Approx(2 * pi * std::cos(2 * pi * x)));
  CHECK(s.derivative(1).terms() == 0);
  CHECK(TrigPoly::cos_mode({8, 0}).grid_mean(8) == doctest::Approx(1.0));
  CHECK(TrigPoly::cos_mode({3, 0}).grid_mean(8) == doctest::Approx(0.0));
  CHECK(TrigPoly::constant(2.0).is_constant());
  CHECK_FALSE(s.is_constant());
  CHECK((s - s).terms() == 0);
  CHECK((2.0 * s) == (s + s));
  TrigPoly p = TrigPoly::sin_mode({2, -3}) * TrigPoly::cos_mode({1, 1});
  CHECK(p.max_abs_freq() == 4);
  CHECK(p.evaluate(0.3, 0.7) ==
        doctest::Approx(std::sin(2 * pi * (0.6 - 2.1)) * std::cos(2 * pi * (1.0))));
}

TEST_CASE("dirichlet energy of trig functions") {
  TrigPoly f = TrigPoly::sin_mode({1, 0});
  CHECK(dirichlet_energy(f, 2) == doctest::Approx(2 * pi * pi));
  CHECK(dirichlet_energy(f, 1) == doctest::Approx(2 * pi * pi));
  TrigPoly g = TrigPoly::cos_mode({1, 2}, 0.5);
  CHECK(dirichlet_energy(g, 2) == doctest::Approx(0.25 * 0.5 * 4 * pi * pi * 5));
  TrigPoly cg = carre(f, f, 2);
  for (double x : {0.0, 0.3}) CHECK(cg.evaluate(x, 0.1) == doctest::Approx(4 * pi * pi * std::pow(std::cos(2 * pi * x), 2)));

  TorusGrid grid(2, 10);
  auto fin = grid.to_finite();
  std::mt19937_64 rng(5);
  TrigPoly r = cli::random_trig(rng, 2);
  CHECK(grid_dirichlet_energy(r, grid) == doctest::Approx(fin.energy(grid.sample(r))).epsilon(1e-11));
}

TEST_CASE("grid geometry") {
  TorusGrid g(2, 6);
  CHECK(g.size() == 36);
  CHECK(g.periodic_distance(0, 5) == doctest::Approx(1.0 / 6));
  CHECK(g.diameter() == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK_THROWS_AS(TorusGrid(3, 8), DomainError);
  CHECK_THROWS_AS(TorusGrid(2, 2), DomainError);
  CHECK_THROWS_AS(TorusGrid(2, 51).to_finite(), ResourceError);
  TrigPoly f = TrigPoly::sin_mode({1, 1});
  Vector v = g.sample(f);
  auto pt = g.point(7);
  CHECK(v[7] == doctest::Approx(f.evaluate(pt[0], pt[1])).epsilon(1e-12));
}

TEST_CASE("spectral kernels match their dense matrices") {
  TorusGrid grid(2, 8);
  auto fin = grid.to_finite();
  std::mt19937_64 rng(7);
  TrigPoly f = cli::random_trig(rng, 2);
  TrigPoly h = cli::random_trig(rng, 2);
  Vector fv = grid.sample(f);
  Vector hv = grid.sample(h);
  std::vector<TorusKernel> ks = {TorusKernel::ball(grid, 0.3), TorusKernel::ball(grid, 0.3, BallNorm::continuum),
                                 TorusKernel::heat(grid, 0.01), TorusKernel::levy(grid, 0.6)};
  for (const auto& k : ks) {
    CAPTURE(k.label());
    Kernel d = k.dense(fin);
    CHECK(d.symmetry_residual() < 1e-10);
    CHECK(rel(k.energy(f), mms::energy_theta(fv, d)) < 1e-9);
    Vector gs = grid.sample(k.gamma(f, h));
    Vector gd = mms::gamma_theta_bilinear(fv, hv, d);
    CHECK(sup_diff(gs, gd) < 1e-9 * std::max(1.0, gd.cwiseAbs().maxCoeff()));
  }
  CHECK(ks[0].support_radius() < 0.3);
  CHECK(ks[2].support_radius() == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(TorusKernel::ball(grid, 0.6), DomainError);
  CHECK_THROWS_AS(TorusKernel::ball(grid, 0.0), DomainError);
  CHECK_THROWS_AS(TorusKernel::ball(grid, 0.05), DomainError);
  CHECK_THROWS_AS(TorusKernel::heat(grid, 0.0), DomainError);
  CHECK_THROWS_AS(TorusKernel::levy(grid, 1.0), DomainError);
  CHECK_THROWS_AS(ks[2].truncated(0.2), UnsupportedInput);
  CHECK_THROWS_AS(ks[0].dense(TorusGrid(2, 6).to_finite()), DimensionError);
}

TEST_CASE("ball moment normalization reproduces the gradient") {
  TorusGrid grid(2, 64);
  TrigPoly f = TrigPoly::sin_mode({1, 0});
  TrigPoly target = carre(f, f, 2);
  TorusGrid probe(2, 16);
  double prev = 1e300;
  for (double r : {0.2, 0.1, 0.05}) {
    TorusKernel k = TorusKernel::ball(grid, r);
    double err = sup_diff(probe.sample(k.gamma(f, f)), probe.sample(target)) / (4 * pi * pi);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.03);
  TorusKernel k = TorusKernel::ball(grid, 0.1);
  CHECK(k.tail_energy(f, 0.11) == 0.0);
  CHECK(k.truncated(0.5).energy(f) == k.energy(f));
  CHECK(k.energy(TrigPoly::constant(3.0)) == 0.0);
}

TEST_CASE("heat energy increases to the grid form") {
  TorusGrid grid(1, 32);
  TrigPoly f = TrigPoly::sin_mode({1, 0}) + TrigPoly::cos_mode({3, 0}, 0.5);
  double prev = 0.0;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    double e = TorusKernel::heat(grid, t).energy(f);
    CHECK(e > prev);
    prev = e;
  }
  CHECK(rel(prev, grid_dirichlet_energy(f, grid)) < 1e-2);
}

TEST_CASE("factorized trig pairing matches dense brute force") {
  TorusGrid grid(2, 10);
  auto fin = grid.to_finite();
  std::mt19937_64 rng(11);
  TorusKernel a = TorusKernel::ball(grid, 0.15);
  TorusKernel b = TorusKernel::ball(grid, 0.2);
  Kernel da = a.dense(fin);
  Kernel db = b.dense(fin);
  const double eps = 0.4;
  for (int p = 1; p <= 2; ++p) {
    ElementaryCochain<TrigPoly> f(static_cast<std::size_t>(p)), h(static_cast<std::size_t>(p));
    for (int t = 0; t < 2; ++t) {
      std::vector<TrigPoly> fs, hs;
      for (int i = 0; i < p; ++i) {
        fs.push_back(cli::random_trig(rng, 2, 2));
        hs.push_back(cli::random_trig(rng, 2, 2));
      }
      f.add_term(cli::random_trig(rng, 2, 1), fs, 1.0 + t);
      h.add_term(cli::random_trig(rng, 2, 1), hs, 1.0 - 0.5 * t);
    }
    TorusKernelList tk = p == 1 ? TorusKernelList{&a} : TorusKernelList{&a, &b};
    mms::KernelList dk = p == 1 ? mms::KernelList{&da} : mms::KernelList{&da, &db};
    auto fv = sample(f, grid);
    auto hv = sample(h, grid);
    for (std::size_t x : {0u, 17u, 55u}) {
      double got = nonlocal_inner_at(x, f, h, tk, eps);
      double want = mms::nonlocal_inner_at(x, fv, hv, dk, eps, mms::Method::brute_force);
      CHECK(std::abs(got - want) < 1e-9 * std::max(1.0, std::abs(want)));
    }
    double tot = nonlocal_inner_total(f, h, tk, eps);
    double want = mms::nonlocal_inner_total(fv, hv, dk, eps, mms::Method::brute_force);
    CHECK(std::abs(tot - want) < 1e-9 * std::max(1.0, std::abs(want)));
    if (p == 2) {
      TorusKernelList swapped{&b, &a};
      CHECK(std::abs(nonlocal_inner_total(f, h, swapped, eps) - tot) < 1e-9 * std::max(1.0, std::abs(tot)));
      TorusKernel wide = TorusKernel::ball(grid, 0.3);
      TorusKernelList bad{&wide, &wide};
      CHECK_THROWS_AS(nonlocal_inner_total(f, h, bad, eps), UnsupportedInput);
      CHECK_THROWS_AS(nonlocal_inner_total(f, h, TorusKernelList{&a}, eps), DimensionError);
    }
  }
}

TEST_CASE("degree one pairing on the torus approaches the energy") {
  TrigPoly f = TrigPoly::sin_mode({1, 0});
  ElementaryCochain<TrigPoly> df(1);
  df.add_term(TrigPoly::constant(1.0), {f});
  double prev = 1e300;
  for (double r : {0.1, 0.05, 0.025}) {
    TorusGrid grid(2, cli::torus_resolution(32, r, 50));
    TorusKernel k = TorusKernel::ball(grid, r);
    double err = rel(nonlocal_inner_total(df, df, {&k}, 2 * r), 2 * pi * pi);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("nonlocal hodge form") {
  TrigPoly f = TrigPoly::sin_mode({1, 1}) + TrigPoly::cos_mode({0, 1});
  TrigPoly g = TrigPoly::cos_mode({1, 0});
  ElementaryCochain<TrigPoly> df(1), gdf(1);
  df.add_term(TrigPoly::constant(1.0), {f});
  gdf.add_term(g, {f});
  for (double r : {0.1, 0.05}) {
    TorusGrid grid(2, cli::torus_resolution(32, r, 50));
    TorusKernel k = TorusKernel::ball(grid, r);
    CHECK(std::abs(hodge_form(df, df, {&k, &k}, 3 * r)) < 1e-12);
    double v = hodge_form(gdf, gdf, {&k, &k}, 3 * r);
    CHECK(v > 0.0);
    CHECK(std::abs(hodge_form(gdf, df, {&k, &k}, 3 * r)) < 1e-12);
  }
}

}  // TEST_SUITE
