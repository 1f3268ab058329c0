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
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dcx/spaces/finite.hpp"

namespace dcx::spaces {

/// Level-m graph approximation of the Sierpinski gasket with its
/// renormalized resistance form and Kusuoka measure.
class SGLevel {
 public:
  using Cell = std::array<std::size_t, 3>;

  explicit SGLevel(int m);

  int level() const { return m_; }
  std::size_t vertex_count() const { return coords_.size(); }
  std::size_t cell_count() const { return cells_.back().size(); }
  /// (5/3)^m
  double scale() const { return scale_; }

  /// Integer coordinates (a, b) of a p0 + (a (p1 - p0) + b (p2 - p0)) / 2^m.
  const std::vector<std::array<int, 2>>& coords() const { return coords_; }
  /// Planar position with p0 = (0, 0), p1 = (1, 0), p2 = (1/2, sqrt 3 / 2).
  std::array<double, 2> position(std::size_t v) const;
  const std::array<std::size_t, 3>& boundary() const { return boundary_; }
  /// Level-m cells in word order; the children of cell i live at 3i..3i+2.
  const std::vector<Cell>& cells() const { return cells_.back(); }
  const std::vector<Cell>& cells(int level) const;

  const Matrix& stiffness() const { return a_; }
  double energy(const Vector& f) const;
  double energy_bilinear(const Vector& f, const Vector& g) const;

  Vector harmonic(const std::array<double, 3>& boundary) const;
  const Vector& h1() const { return h1_; }
  const Vector& h2() const { return h2_; }

  /// Per-cell scaled pair sums (5/3)^m sum (f(x) - f(y)) (g(x) - g(y)).
  Vector cell_energy(const Vector& f, const Vector& g) const;
  const Vector& cell_weights() const { return nu_cell_; }
  const Vector& vertex_weights() const { return nu_vertex_; }
  Vector cell_means(const Vector& f) const;

  /// R(x, y) = G_xx + G_yy - 2 G_xy with G = (A + 11^T / n)^{-1}.
  Matrix resistance_metric() const;
  /// Resistance metric, lumped Kusuoka weights and the level-m form.
  FiniteDirichletSpace dirichlet_space() const;

 private:
  int m_;
  double scale_;
  std::vector<std::array<int, 2>> coords_;
  std::array<std::size_t, 3> boundary_{};
  std::vector<std::vector<Cell>> cells_;
  Matrix a_;
  Vector h1_, h2_;
  Vector nu_cell_, nu_vertex_;
};

Vector harmonic_extension(const std::array<double, 3>& boundary, int m);
double sg_energy(const Vector& f, int m);
double sg_energy_bilinear(const Vector& f, const Vector& g, int m);

struct KusuokaWeights {
  Vector cells;
  Vector vertices;
};
KusuokaWeights kusuoka_weights(int m);

/// Cell-constant carre du champ Gamma(f, g)|_w = nu_{f,g}(K_w) / nu(K_w) on
/// functions given by their level-m vertex values.
class SGField {
 public:
  using Function = Vector;
  explicit SGField(const SGLevel& level) : level_(&level) {}

  std::size_t size() const { return level_->cell_count(); }
  double weight(std::size_t w) const { return level_->cell_weights()[static_cast<Eigen::Index>(w)]; }
  Vector values(const Vector& f) const { return level_->cell_means(f); }
  Vector gamma(const Vector& f, const Vector& g) const;
  Vector one() const { return Vector::Ones(static_cast<Eigen::Index>(level_->vertex_count())); }
  bool is_constant(const Vector& f) const;
  bool equal(const Vector& a, const Vector& b) const { return a.size() == b.size() && a == b; }
  const SGLevel& level() const { return *level_; }

 private:
  const SGLevel* level_;
};

}  // namespace dcx::spaces
