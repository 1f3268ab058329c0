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
#include <functional>
#include <memory>
#include <numeric>
#include <random>

#include <doctest.h>
#include <gmpxx.h>

#include "dcx/error.hpp"
#include "dcx/kas.hpp"
#include "oracles.hpp"

using namespace dcx::kas;

namespace {

Vector random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(rng);
  return v;
}

std::shared_ptr<const FiniteMetricMeasureSpace> random_space(std::mt19937_64& rng, std::size_t n,
                                                             int dim = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix pts(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (int k = 0; k < dim; ++k) pts(i, k) = u(rng);
  }
  Vector mu(static_cast<Eigen::Index>(n));
  for (auto& m : mu) m = 0.5 + u(rng);
  return std::make_shared<const FiniteMetricMeasureSpace>(FiniteMetricMeasureSpace::from_points(pts, mu));
}

std::size_t components(const FiniteMetricMeasureSpace& s, double eps) {
  std::vector<std::size_t> parent(s.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s.dist(i, j) < eps) parent[find(i)] = find(j);
    }
  }
  std::size_t c = 0;
  for (std::size_t i = 0; i < s.size(); ++i) c += find(i) == i ? 1 : 0;
  return c;
}

Matrix circle(std::size_t n) {
  Matrix pts(static_cast<Eigen::Index>(n), 2);
  for (std::size_t k = 0; k < n; ++k) {
    double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    pts(static_cast<Eigen::Index>(k), 0) = std::cos(a);
    pts(static_cast<Eigen::Index>(k), 1) = std::sin(a);
  }
  return pts;
}

}  // namespace

TEST_CASE("space validation") {
  Matrix d(2, 2);
  d << 0, 1, 2, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace(d, Vector::Ones(2)), dcx::DomainError);
  Matrix ok(2, 2);
  ok << 0, 1, 1, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace(ok, Vector::Zero(2)), dcx::DomainError);
  Matrix tri(3, 3);
  tri << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(FiniteMetricMeasureSpace(tri, Vector::Ones(3)), dcx::DomainError);
  CHECK_NOTHROW(FiniteMetricMeasureSpace(tri, Vector::Ones(3), std::nullopt, false));
  FiniteMetricMeasureSpace s(ok, Vector::Ones(2));
  CHECK(s.diameter() == 1.0);
  CHECK(s.min_distance() == 1.0);
}

TEST_CASE("alt small cases") {
  Vector f(3), g(3);
  f << 1, 2, 3;
  g << -1, 0.5, 4;
  std::vector<std::vector<double>> fg = {{1, 2, 3}, {-1, 0.5, 4}};
  auto t = MultiFunction<double>::tensor(fg);
  auto a = alt(t);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      CHECK(a[{x, y}] == doctest::Approx(0.5 * (f[x] * g[y] - f[y] * g[x])));
    }
  }
  auto twice = alt(a);
  for (std::size_t k = 0; k < a.flat_size(); ++k) CHECK(std::abs(twice.at_flat(k) - a.at_flat(k)) <= 1e-14);
  auto sym = alt(MultiFunction<double>::tensor({fg[0], fg[0]}));
  for (double v : sym.values()) CHECK(v == 0.0);
}

TEST_CASE("raw coboundary") {
  MultiFunction<double> f(4, 1);
  for (std::size_t i = 0; i < 4; ++i) f[{i}] = static_cast<double>(i * i);
  auto d = coboundary(f);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) CHECK(d[{x, y}] == f[{y}] - f[{x}]);
  }
  MultiFunction<double> one(4, 1, 1.0);
  auto done = coboundary(one);
  for (double v : done.values()) CHECK(v == 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t k = 1; k <= 3; ++k) {
    MultiFunction<double> r(5, k);
    for (std::size_t i = 0; i < r.flat_size(); ++i) r.at_flat(i) = g(rng);
    auto dd = coboundary(coboundary(r));
    for (double v : dd.values()) CHECK(std::abs(v) <= 1e-12);
    auto lhs = coboundary(alt(r));
    auto rhs = alt(coboundary(r));
    for (std::size_t i = 0; i < lhs.flat_size(); ++i) CHECK(std::abs(lhs.at_flat(i) - rhs.at_flat(i)) <= 1e-12);
  }
}

TEST_CASE("eval_elementary examples") {
  std::mt19937_64 rng(7);
  const std::size_t n = 6;
  Vector one = Vector::Ones(n);
  Vector f = random_vec(rng, n);
  ElementaryCochain<Vector> c1(1);
  c1.add_term(one, {f});
  CHECK(eval_elementary(c1, {2, 4}) == doctest::Approx(f[4] - f[2]));
  ElementaryCochain<Vector> rep(2);
  rep.add_term(random_vec(rng, n), {f, f});
  CHECK(eval_elementary(rep, {0, 1, 2}) == 0.0);
  ElementaryCochain<Vector> c2(2);
  c2.add_term(random_vec(rng, n), {random_vec(rng, n), random_vec(rng, n)}, 0.7);
  c2.add_term(random_vec(rng, n), {random_vec(rng, n), random_vec(rng, n)}, -1.3);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        double want = dcx::test::elementary_value(c2, {a, b, c});
        CHECK(std::abs(eval_elementary(c2, {a, b, c}) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
  CHECK_THROWS_AS(c2.add_term(one, {f}), dcx::DimensionError);
}

TEST_CASE("exact elementary evaluation in rationals") {
  std::vector<mpq_class> g = {1, 2, 3};
  std::vector<std::vector<mpq_class>> fs = {{0, 1, 0}, {0, 0, 1}};
  // gbar = 2, det = 1, 1/2!
  CHECK(eval_elementary_exact(g, fs, {0, 1, 2}) == mpq_class(1));
}

TEST_CASE("neighborhood membership") {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  FiniteMetricMeasureSpace s(d, Vector::Ones(3));
  CHECK(in_neighborhood({1}, 1e-9, s));
  CHECK_FALSE(in_neighborhood({0, 1}, 1.0, s));
  CHECK(in_neighborhood({0, 1}, 1.0 + 1e-12, s));
  CHECK(in_neighborhood({0, 1, 2}, 2.5, s));
  CHECK_FALSE(in_neighborhood({0, 1, 2}, 2.0, s));
}

TEST_CASE("dense cochains") {
  std::mt19937_64 rng(9);
  auto space = random_space(rng, 7);
  auto basis = std::make_shared<const NeighborhoodBasis>(space, 0.6, 3);
  std::normal_distribution<double> g;
  for (std::size_t p = 0; p <= 1; ++p) {
    Cochain f(basis, p);
    for (auto& v : f.values()) v = g(rng);
    auto dd = coboundary(coboundary(f, 0.6), 0.6);
    for (double v : dd.values()) CHECK(std::abs(v) <= 1e-12);
  }
  Cochain f(basis, 1);
  CHECK_THROWS_AS(coboundary(f, 0.5), dcx::DomainError);
  ElementaryCochain<Vector> e(1);
  e.add_term(random_vec(rng, 7), {random_vec(rng, 7)});
  auto m = materialize(e, basis);
  for (std::size_t k = 0; k < basis->count(1); ++k) {
    const auto& t = basis->tuples(1)[k];
    CHECK(m.value(t) == doctest::Approx(eval_elementary(e, t)));
    CHECK(m.value({t[1], t[0]}) == doctest::Approx(-eval_elementary(e, t)));
  }
  CHECK(m.value({0, 0}) == 0.0);
}

TEST_CASE("cohomology above the diameter is trivial") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_space(rng, 7);
    auto dims = kas_cohomology_dims(*s, s->diameter() * 1.01, 2);
    CHECK(dims[0] == 1);
    CHECK(dims[1] == 0);
    CHECK(dims[2] == 0);
  }
}

TEST_CASE("cohomology below the minimal distance") {
  std::mt19937_64 rng(22);
  auto s = random_space(rng, 6);
  auto dims = kas_cohomology_dims(*s, s->min_distance() * 0.99, 2);
  CHECK(dims[0] == 6);
  CHECK(dims[1] == 0);
  CHECK(dims[2] == 0);
}

TEST_CASE("circle cohomology matches the Rips oracle") {
  auto s = FiniteMetricMeasureSpace::from_points(circle(12));
  auto dims = kas_cohomology_dims(s, 0.8, 2);
  CHECK(dims == std::vector<std::size_t>{1, 1, 0});
  auto lo = dcx::test::rips_cohomology(s.dist(), 0.8 - 1e-9, 2);
  auto hi = dcx::test::rips_cohomology(s.dist(), 0.8 + 1e-9, 2);
  CHECK(lo == dims);
  CHECK(hi == dims);
}

TEST_CASE("H0 counts eps-components and agrees with Rips at generic scales") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_space(rng, 8);
    for (double eps : {0.2, 0.35, 0.5}) {
      auto dims = kas_cohomology_dims(*s, eps, 2);
      CHECK(dims[0] == components(*s, eps));
      CHECK(dims == dcx::test::rips_cohomology(s->dist(), eps, 2));
    }
  }
}

TEST_CASE("tuple cap") {
  std::mt19937_64 rng(24);
  auto s = random_space(rng, 8);
  try {
    kas_cohomology_dims(*s, 10.0, 3, 50);
    FAIL("expected ResourceError");
  } catch (const dcx::ResourceError& e) {
    CHECK(e.cap() == 50);
    CHECK(e.count() > 50);
  }
}

TEST_CASE("rational rank") {
  std::vector<IntEntry> e = {{0, 0, 1}, {0, 1, 2}, {1, 0, 2}, {1, 1, 4}, {2, 2, -3}};
  CHECK(rational_rank(3, 3, e) == 2);
  CHECK(rational_rank(2, 2, {}) == 0);
}
