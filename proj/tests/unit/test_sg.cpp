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
#include <random>

#include <doctest.h>

#include "dcx/cli/experiments.hpp"
#include "dcx/error.hpp"
#include "dcx/forms.hpp"
#include "dcx/mms.hpp"
#include "dcx/spaces/product_sg.hpp"
#include "dcx/spaces/sg.hpp"

using namespace dcx;
using namespace dcx::spaces;

namespace {

Vector random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(rng);
  return v;
}

// Direct Dirichlet problem: interior values minimizing the level form.
Vector laplace_solve(const SGLevel& l, const std::array<double, 3>& b) {
  const auto n = static_cast<Eigen::Index>(l.vertex_count());
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  Vector u = Vector::Zero(n);
  for (int i = 0; i < 3; ++i) {
    fixed[l.boundary()[static_cast<std::size_t>(i)]] = true;
    u[static_cast<Eigen::Index>(l.boundary()[static_cast<std::size_t>(i)])] = b[static_cast<std::size_t>(i)];
  }
  std::vector<Eigen::Index> in;
  for (Eigen::Index v = 0; v < n; ++v) {
    if (!fixed[static_cast<std::size_t>(v)]) in.push_back(v);
  }
  const auto k = static_cast<Eigen::Index>(in.size());
  Matrix aii(k, k);
  Vector rhs = -(l.stiffness() * u);
  Vector r(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    r[i] = rhs[in[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < k; ++j) aii(i, j) = l.stiffness()(in[static_cast<std::size_t>(i)], in[static_cast<std::size_t>(j)]);
  }
  Vector x = aii.ldlt().solve(r);
  for (Eigen::Index i = 0; i < k; ++i) u[in[static_cast<std::size_t>(i)]] = x[i];
  return u;
}

}  // namespace

TEST_SUITE("sg") {

TEST_CASE("level structure") {
  for (int m = 0; m <= 4; ++m) {
    SGLevel l(m);
    long p3 = static_cast<long>(std::pow(3, m));
    CHECK(l.cell_count() == static_cast<std::size_t>(p3));
    CHECK(l.vertex_count() == static_cast<std::size_t>((3 * p3 + 3) / 2));
    CHECK(l.scale() == doctest::Approx(std::pow(5.0 / 3.0, m)));
    CHECK((l.stiffness() * Vector::Ones(static_cast<Eigen::Index>(l.vertex_count()))).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(SGLevel(-1), DomainError);
  CHECK_THROWS_AS(SGLevel(3).cells(4), DomainError);
  CHECK_THROWS_AS(SGLevel(2).energy(Vector::Zero(3)), DimensionError);
}

TEST_CASE("harmonic extension") {
  SGLevel l1(1);
  Vector h = l1.harmonic({1.0, 0.0, 0.0});
  const auto& c = l1.cells();
  // midpoints next to the corner carry 2/5, the opposite one 1/5
  CHECK(h[static_cast<Eigen::Index>(c[0][1])] == doctest::Approx(0.4));
  CHECK(h[static_cast<Eigen::Index>(c[0][2])] == doctest::Approx(0.4));
  CHECK(h[static_cast<Eigen::Index>(c[1][2])] == doctest::Approx(0.2));
  for (int m = 1; m <= 5; ++m) {
    SGLevel l(m);
    std::array<double, 3> b{0.3, -1.2, 2.0};
    Vector u = l.harmonic(b);
    CHECK((u - laplace_solve(l, b)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((harmonic_extension(b, m) - u).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("energy of harmonic coordinates is level independent") {
  for (int m = 0; m <= 6; ++m) {
    SGLevel l(m);
    CHECK(l.energy(l.h1()) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(l.energy(l.h2()) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(l.energy_bilinear(l.h1(), l.h2()) == doctest::Approx(-1.0).epsilon(1e-11));
    CHECK(sg_energy(l.h1(), m) == doctest::Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("energy is a quadratic form") {
  std::mt19937_64 rng(3);
  SGLevel l(3);
  Vector f = random_vec(rng, l.vertex_count());
  Vector g = random_vec(rng, l.vertex_count());
  double pol = 0.25 * (l.energy(f + g) - l.energy(f - g));
  CHECK(l.energy_bilinear(f, g) == doctest::Approx(pol).epsilon(1e-11));
  CHECK(sg_energy_bilinear(f, g, 3) == doctest::Approx(pol).epsilon(1e-11));
  CHECK(l.energy(f) == doctest::Approx(f.dot(l.stiffness() * f)).epsilon(1e-11));
  Vector c = Vector::Constant(static_cast<Eigen::Index>(l.vertex_count()), 4.0);
  CHECK(l.energy(c) == 0.0);
}

TEST_CASE("kusuoka measure") {
  for (int m = 1; m <= 5; ++m) {
    auto w = kusuoka_weights(m);
    CHECK(w.cells.sum() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(w.vertices.sum() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(w.cells.minCoeff() > 0.0);
    auto finer = kusuoka_weights(m + 1);
    for (Eigen::Index i = 0; i < w.cells.size(); ++i) {
      double kids = finer.cells[3 * i] + finer.cells[3 * i + 1] + finer.cells[3 * i + 2];
      CHECK(kids == doctest::Approx(w.cells[i]).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(kusuoka_weights(0), DomainError);
  SGLevel l(4);
  SGField field(l);
  Vector sum = field.gamma(l.h1(), l.h1()) + field.gamma(l.h2(), l.h2());
  CHECK((sum.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("resistance metric") {
  for (int m = 0; m <= 3; ++m) {
    SGLevel l(m);
    Matrix r = l.resistance_metric();
    auto b = l.boundary();
    CHECK(r(static_cast<Eigen::Index>(b[0]), static_cast<Eigen::Index>(b[1])) == doctest::Approx(2.0 / 3.0));
    CHECK(r(static_cast<Eigen::Index>(b[1]), static_cast<Eigen::Index>(b[2])) == doctest::Approx(2.0 / 3.0));
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  auto ds = SGLevel(2).dirichlet_space();
  CHECK(ds.size() == 15);
  CHECK(ds.space->mu().sum() == doctest::Approx(4.0));
}

TEST_CASE("gasket heat kernels") {
  SGLevel l(3);
  auto b = l.dirichlet_space();
  SpectralGenerator gen(b);
  CHECK(gen.conservative());
  Vector c = Vector::Constant(static_cast<Eigen::Index>(l.vertex_count()), -2.0);
  Kernel k = heat_kernel(b, gen, 1e-3);
  CHECK(k.symmetry_residual() < 1e-10);
  CHECK(mms::gamma_theta(c, k).cwiseAbs().maxCoeff() < 1e-20);
  double prev = 0.0;
  for (double t : {1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5}) {
    double e = mms::energy_theta(l.h1(), heat_kernel(b, gen, t));
    CHECK(e >= prev - 1e-9);
    CHECK(e <= 2.0 + 1e-9);
    prev = e;
  }
  CHECK(prev == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(levy_kernel(b, gen, 0.7).symmetry_residual() < 1e-10);
}

TEST_CASE("degree one form of a harmonic coordinate") {
  for (int m : {2, 4, 6}) {
    SGLevel l(m);
    SGField field(l);
    forms::ElementaryForm<Vector> w(1);
    w.add_term(field.one(), {l.h1()});
    CHECK(forms::form_l2_inner(field, w, w) == doctest::Approx(2.0).epsilon(1e-11));
  }
}

TEST_CASE("product gasket kernel") {
  ProductSG ps(2, 2);
  CHECK(ps.size() == 225);
  CHECK_THROWS_AS(ProductSG(2, 3), DimensionError);
  const std::size_t n1 = ps.factor(0).vertex_count();
  const std::size_t n2 = ps.factor(1).vertex_count();
  std::mt19937_64 rng(9);
  Matrix u = Matrix::Random(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  Matrix v = Matrix::Random(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
  for (double t : {1.0, 0.1, 0.01}) {
    KroneckerKernel k(ps, t);
    CHECK(k.symmetry_residual() < 1e-10);
    CHECK(k.conservativity_residual() < 1e-10);
    const Matrix& p1 = k.transition(0);
    const Matrix& p2 = k.transition(1);
    Matrix got = k.gamma(u, v);
    double worst = 0.0;
    for (std::size_t x1 = 0; x1 < n1; ++x1) {
      for (std::size_t x2 = 0; x2 < n2; ++x2) {
        double acc = 0.0;
        for (std::size_t y1 = 0; y1 < n1; ++y1) {
          for (std::size_t y2 = 0; y2 < n2; ++y2) {
            if (y1 == x1 && y2 == x2) continue;
            double j = p1(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(y1)) *
                       p2(static_cast<Eigen::Index>(x2), static_cast<Eigen::Index>(y2)) / (2 * t);
            CHECK_MESSAGE(std::abs(k.entry(x1 * n2 + x2, y1 * n2 + y2) - j) < 1e-13, "entry");
            acc += j * (u(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(x2)) - u(static_cast<Eigen::Index>(y1), static_cast<Eigen::Index>(y2))) *
                   (v(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(x2)) - v(static_cast<Eigen::Index>(y1), static_cast<Eigen::Index>(y2)));
          }
        }
        worst = std::max(worst, std::abs(acc - got(static_cast<Eigen::Index>(x1), static_cast<Eigen::Index>(x2))));
      }
    }
    CHECK(worst < 1e-11);
  }
  CHECK_THROWS_AS(KroneckerKernel(ps, 0.0), DomainError);
}

TEST_CASE("product carre du champ sup bound") {
  ProductSG ps(2, 2);
  const auto& l = ps.factor(0);
  Vector f1 = l.h1() + 0.3 * l.h2().cwiseProduct(l.h2());
  Vector f2 = cli::cylinder(l, {0.2, -1.0, 0.5, 0.4, 0.7, -0.3});
  auto pure = TensorSum::pure(f1, f2);
  auto factor = [](const Matrix& p, const Vector& f, double t) {
    Vector out(f.size());
    for (Eigen::Index x = 0; x < f.size(); ++x) {
      out[x] = (p.row(x).transpose().array() * (f.array() - f[x]).square()).sum() / (2 * t);
    }
    return out.maxCoeff();
  };
  for (double t : {1.0, 0.1, 0.01}) {
    KroneckerKernel k(ps, t);
    double lhs = k.gamma(pure, pure).cwiseAbs().maxCoeff();
    double rhs = 2 * f1.cwiseAbs2().maxCoeff() * factor(k.transition(1), f2, t) +
                 2 * f2.cwiseAbs2().maxCoeff() * factor(k.transition(0), f1, t);
    CHECK(lhs > 0.0);
    CHECK(lhs <= rhs * (1 + 1e-12));
  }
}

TEST_CASE("product energies") {
  ProductSG ps(3, 3);
  const auto& l = ps.factor(0);
  const Eigen::Index n = static_cast<Eigen::Index>(l.vertex_count());
  Vector one = Vector::Ones(n);
  TensorSum f = TensorSum::pure(l.h1(), one) + TensorSum::pure(l.h2(), l.h1(), 0.5);
  double target = cli::product_energy(ps, f);
  CHECK(cli::product_energy(ps, TensorSum::pure(l.h1(), one)) == doctest::Approx(2.0 * 4.0));
  double prev = 0.0;
  for (double t : {1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5}) {
    double e = KroneckerKernel(ps, t).energy(f);
    CHECK(e <= target * (1 + 1e-9));
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(prev == doctest::Approx(target).epsilon(1e-2));

  Matrix m = f.to_matrix(l.vertex_count(), l.vertex_count());
  CHECK(m(3, 4) == doctest::Approx(l.h1()[3] + 0.5 * l.h2()[3] * l.h1()[4]));
  KroneckerKernel k(ps, 0.1);
  CHECK((k.gamma(f, f) - k.gamma(m, m)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("product carre du champ") {
  ProductSG ps(2, 2);
  ProductField field(ps);
  const auto& l = ps.factor(0);
  SGField s1(l);
  Vector one = Vector::Ones(static_cast<Eigen::Index>(l.vertex_count()));
  TensorSum a = TensorSum::pure(l.h1(), one);
  TensorSum b = TensorSum::pure(one, l.h1());
  CHECK(field.is_constant(field.one()));
  CHECK_FALSE(field.is_constant(a));
  Vector gaa = product_carre(field, a, a);
  Vector g1 = s1.gamma(l.h1(), l.h1());
  const std::size_t c = l.cell_count();
  for (std::size_t w1 = 0; w1 < c; ++w1) {
    for (std::size_t w2 = 0; w2 < c; ++w2) {
      CHECK(gaa[static_cast<Eigen::Index>(w1 * c + w2)] == doctest::Approx(g1[static_cast<Eigen::Index>(w1)]));
    }
  }
  CHECK(product_carre(field, a, b).cwiseAbs().maxCoeff() < 1e-14);
  forms::ElementaryForm<TensorSum> w(2);
  w.add_term(field.one(), {a, b});
  double norm = forms::form_norm_l2(field, w);
  CHECK(norm > 0.0);
  CHECK(norm * norm == doctest::Approx(2.0 * 2.0).epsilon(1e-10));
  forms::ElementaryForm<TensorSum> ww(2);
  ww.add_term(field.one(), {a, a});
  CHECK(forms::form_norm_l2(field, ww) == 0.0);
}

}  // TEST_SUITE
