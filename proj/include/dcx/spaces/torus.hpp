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

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcx/kas.hpp"
#include "dcx/mms.hpp"
#include "dcx/spaces/finite.hpp"

namespace dcx::spaces {

using Freq = std::array<int, 2>;
using Complex = std::complex<double>;

/// Finite sum of modes c_k exp(2 pi i k.x) on the unit torus (n <= 2; the
/// second frequency component is 0 for n = 1).
class TrigPoly {
 public:
  TrigPoly() = default;

  static TrigPoly constant(double c);
  static TrigPoly mode(Freq k, Complex c);
  /// amp * cos(2 pi k.x)
  static TrigPoly cos_mode(Freq k, double amp = 1.0);
  /// amp * sin(2 pi k.x)
  static TrigPoly sin_mode(Freq k, double amp = 1.0);

  const std::map<Freq, Complex>& coeffs() const { return c_; }
  Complex coeff(Freq k) const;
  std::size_t terms() const { return c_.size(); }

  TrigPoly& operator+=(const TrigPoly& o);
  TrigPoly& operator-=(const TrigPoly& o);
  TrigPoly& operator*=(double s);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }
  friend TrigPoly operator*(double s, TrigPoly a) { return a *= s; }
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);
  bool operator==(const TrigPoly& o) const { return c_ == o.c_; }

  /// d/dx_axis
  TrigPoly derivative(int axis) const;
  TrigPoly conj() const;
  /// Real part of the value at x.
  double evaluate(double x1, double x2 = 0.0) const;
  /// Integral over the unit torus.
  double mean() const;
  /// Mean over the grid (Z/res)^n: aliased modes k = 0 mod res.
  double grid_mean(int res) const;
  bool is_constant() const;
  int max_abs_freq() const;

 private:
  std::map<Freq, Complex> c_;
};

/// Uniform grid (Z/res)^n on the unit torus, mu = res^{-n}.
class TorusGrid {
 public:
  TorusGrid(int n, int res);

  int dim() const { return n_; }
  int res() const { return res_; }
  double spacing() const { return 1.0 / res_; }
  std::size_t size() const;
  std::array<double, 2> point(std::size_t i) const;
  std::array<int, 2> lattice(std::size_t i) const;
  /// Minimal periodic lattice offset b - a per axis.
  std::array<int, 2> offset(std::size_t a, std::size_t b) const;
  double periodic_distance(std::size_t a, std::size_t b) const;
  double diameter() const;
  Vector sample(const TrigPoly& f) const;
  /// Dense backend: periodic distances, uniform weights and the nearest
  /// neighbour form sum_x mu sum_i ((f(x + h e_i) - f(x)) / h)^2.
  FiniteDirichletSpace to_finite() const;

 private:
  int n_;
  int res_;
};

/// grad f . grad g
TrigPoly carre(const TrigPoly& f, const TrigPoly& g, int n);
/// Integral of |grad f|^2.
double dirichlet_energy(const TrigPoly& f, int n);
/// Forward-difference energy on the grid; the form generating the grid heat
/// semigroup.
double grid_dirichlet_energy(const TrigPoly& f, const TorusGrid& grid);

/// Translation-invariant kernel on a torus grid, given by its symbol
/// psi(k) = sum_z j(0, z) (1 - cos 2 pi k.z).
class TorusKernel {
 public:
  enum class Kind { ball, heat, levy };

  static TorusKernel ball(const TorusGrid& grid, double r, BallNorm norm = BallNorm::moment);
  static TorusKernel heat(const TorusGrid& grid, double t);
  static TorusKernel levy(const TorusGrid& grid, double alpha);

  Kind kind() const;
  const TorusGrid& grid() const;
  const std::string& label() const;
  double parameter() const;
  /// Largest distance carrying mass; infinity for heat and Levy kernels.
  double support_radius() const;
  /// Per-point mass c h^n of a ball kernel.
  double point_mass() const;
  double symbol(Freq k) const;

  /// Ball kernel with mass only on distances below eps.
  TorusKernel truncated(double eps) const;

  /// Gamma_theta(f, h) as a trig polynomial.
  TrigPoly gamma(const TrigPoly& f, const TrigPoly& h) const;
  /// sum_y j(x, y) (f(y) - f(x)) (h(y) - h(x)) w(y)
  TrigPoly moment(const TrigPoly& f, const TrigPoly& h, const TrigPoly& w) const;
  double energy(const TrigPoly& f) const;
  double tail_energy(const TrigPoly& f, double eps) const;

  /// The same kernel as a dense matrix on grid().to_finite().
  Kernel dense(const FiniteDirichletSpace& finite) const;

 private:
  struct Impl;
  explicit TorusKernel(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

using TorusKernelList = std::vector<const TorusKernel*>;

/// x0 |-> nonlocal_inner_at(x0, F, H) as a trig polynomial; requires kernel
/// supports inside eps (truncation is applied for p = 1 ball kernels).
TrigPoly nonlocal_density(const kas::ElementaryCochain<TrigPoly>& f,
                          const kas::ElementaryCochain<TrigPoly>& h,
                          const TorusKernelList& kernels, double eps);
double nonlocal_inner_at(std::size_t x0, const kas::ElementaryCochain<TrigPoly>& f,
                         const kas::ElementaryCochain<TrigPoly>& h,
                         const TorusKernelList& kernels, double eps);
double nonlocal_inner_total(const kas::ElementaryCochain<TrigPoly>& f,
                            const kas::ElementaryCochain<TrigPoly>& h,
                            const TorusKernelList& kernels, double eps);
double hodge_form(const kas::ElementaryCochain<TrigPoly>& f,
                  const kas::ElementaryCochain<TrigPoly>& h, const TorusKernelList& kernels,
                  double eps);

/// Samples a trig cochain on a dense grid backend.
kas::ElementaryCochain<Vector> sample(const kas::ElementaryCochain<TrigPoly>& f,
                                      const TorusGrid& grid);

/// Carre du champ field: analytic gradients sampled on a quadrature grid.
class TorusField {
 public:
  using Function = TrigPoly;
  TorusField(int n, int quad_res);

  std::size_t size() const { return grid_.size(); }
  double weight(std::size_t) const { return weight_; }
  Vector values(const TrigPoly& f) const { return grid_.sample(f); }
  Vector gamma(const TrigPoly& f, const TrigPoly& g) const {
    return grid_.sample(carre(f, g, grid_.dim()));
  }
  TrigPoly one() const { return TrigPoly::constant(1.0); }
  bool is_constant(const TrigPoly& f) const { return f.is_constant(); }
  bool equal(const TrigPoly& a, const TrigPoly& b) const { return a == b; }
  const TorusGrid& grid() const { return grid_; }

 private:
  TorusGrid grid_;
  double weight_;
};

}  // namespace dcx::spaces
