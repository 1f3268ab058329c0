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

#include "dcx/spaces/sg.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "dcx/error.hpp"

namespace dcx::spaces {
namespace {

using Index = Eigen::Index;
constexpr int kMaxLevel = 10;

Index ix(std::size_t i) { return static_cast<Index>(i); }

}  // namespace

SGLevel::SGLevel(int m) : m_(m), scale_(std::pow(5.0 / 3.0, m)) {
  if (m < 0 || m > kMaxLevel) {
    throw DomainError("gasket level must lie in [0, " + std::to_string(kMaxLevel) + "]");
  }
  const int s = 1 << m;
  std::map<std::array<int, 2>, std::size_t> lookup;
  auto vertex = [&](std::array<int, 2> c) {
    auto [it, inserted] = lookup.emplace(c, coords_.size());
    if (inserted) coords_.push_back(c);
    return it->second;
  };
  boundary_ = {vertex({0, 0}), vertex({s, 0}), vertex({0, s})};
  cells_.push_back({boundary_});
  for (int k = 0; k < m; ++k) {
    std::vector<Cell> next;
    next.reserve(cells_.back().size() * 3);
    for (const Cell& c : cells_.back()) {
      auto mid = [&](std::size_t a, std::size_t b) {
        return vertex({(coords_[a][0] + coords_[b][0]) / 2, (coords_[a][1] + coords_[b][1]) / 2});
      };
      std::size_t m01 = mid(c[0], c[1]);
      std::size_t m02 = mid(c[0], c[2]);
      std::size_t m12 = mid(c[1], c[2]);
      next.push_back({c[0], m01, m02});
      next.push_back({m01, c[1], m12});
      next.push_back({m02, m12, c[2]});
    }
    cells_.push_back(std::move(next));
  }

  const std::size_t n = coords_.size();
  a_ = Matrix::Zero(ix(n), ix(n));
  for (const Cell& c : cells_.back()) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        Index x = ix(c[static_cast<std::size_t>(i)]);
        Index y = ix(c[static_cast<std::size_t>(j)]);
        a_(x, x) += scale_;
        a_(y, y) += scale_;
        a_(x, y) -= scale_;
        a_(y, x) -= scale_;
      }
    }
  }

  h1_ = harmonic({0.0, 1.0, 0.0});
  h2_ = harmonic({0.0, 0.0, 1.0});
  nu_cell_ = cell_energy(h1_, h1_) + cell_energy(h2_, h2_);
  nu_vertex_ = Vector::Zero(ix(n));
  const auto& top = cells_.back();
  for (std::size_t w = 0; w < top.size(); ++w) {
    for (std::size_t v : top[w]) nu_vertex_[ix(v)] += nu_cell_[ix(w)] / 3.0;
  }
}

std::array<double, 2> SGLevel::position(std::size_t v) const {
  const double s = static_cast<double>(1 << m_);
  double a = coords_[v][0] / s;
  double b = coords_[v][1] / s;
  return {a + 0.5 * b, 0.5 * std::sqrt(3.0) * b};
}

const std::vector<SGLevel::Cell>& SGLevel::cells(int level) const {
  if (level < 0 || level > m_) throw DomainError("cell level out of range");
  return cells_[static_cast<std::size_t>(level)];
}

double SGLevel::energy(const Vector& f) const { return energy_bilinear(f, f); }

double SGLevel::energy_bilinear(const Vector& f, const Vector& g) const {
  return cell_energy(f, g).sum();
}

Vector SGLevel::harmonic(const std::array<double, 3>& b) const {
  Vector u = Vector::Zero(ix(coords_.size()));
  for (int i = 0; i < 3; ++i) u[ix(boundary_[static_cast<std::size_t>(i)])] = b[static_cast<std::size_t>(i)];
  for (int k = 0; k < m_; ++k) {
    const auto& parents = cells_[static_cast<std::size_t>(k)];
    const auto& children = cells_[static_cast<std::size_t>(k) + 1];
    for (std::size_t w = 0; w < parents.size(); ++w) {
      const Cell& c = parents[w];
      double a0 = u[ix(c[0])], a1 = u[ix(c[1])], a2 = u[ix(c[2])];
      std::size_t m01 = children[3 * w][1];
      std::size_t m02 = children[3 * w][2];
      std::size_t m12 = children[3 * w + 1][2];
      u[ix(m01)] = (2.0 * a0 + 2.0 * a1 + a2) / 5.0;
      u[ix(m02)] = (2.0 * a0 + 2.0 * a2 + a1) / 5.0;
      u[ix(m12)] = (2.0 * a1 + 2.0 * a2 + a0) / 5.0;
    }
  }
  return u;
}

Vector SGLevel::cell_energy(const Vector& f, const Vector& g) const {
  if (f.size() != ix(coords_.size()) || g.size() != ix(coords_.size())) {
    throw DimensionError("gasket function has " + std::to_string(f.size()) +
                         " values, level has " + std::to_string(coords_.size()) + " vertices");
  }
  const auto& top = cells_.back();
  Vector e(ix(top.size()));
  for (std::size_t w = 0; w < top.size(); ++w) {
    const Cell& c = top[w];
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        Index x = ix(c[static_cast<std::size_t>(i)]);
        Index y = ix(c[static_cast<std::size_t>(j)]);
        s += (f[x] - f[y]) * (g[x] - g[y]);
      }
    }
    e[ix(w)] = scale_ * s;
  }
  return e;
}

Vector SGLevel::cell_means(const Vector& f) const {
  if (f.size() != ix(coords_.size())) throw DimensionError("gasket function has the wrong size");
  const auto& top = cells_.back();
  Vector out(ix(top.size()));
  for (std::size_t w = 0; w < top.size(); ++w) {
    const Cell& c = top[w];
    out[ix(w)] = (f[ix(c[0])] + f[ix(c[1])] + f[ix(c[2])]) / 3.0;
  }
  return out;
}

Matrix SGLevel::resistance_metric() const {
  const Index n = ix(coords_.size());
  Matrix b = a_ + Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  Matrix g = b.ldlt().solve(Matrix::Identity(n, n));
  Matrix r = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      r(x, y) = std::max(0.0, g(x, x) + g(y, y) - g(x, y) - g(y, x));
      r(y, x) = r(x, y);
    }
  }
  return r;
}

FiniteDirichletSpace SGLevel::dirichlet_space() const {
  auto space = std::make_shared<const FiniteMetricMeasureSpace>(resistance_metric(), nu_vertex_,
                                                                std::nullopt, false);
  return FiniteDirichletSpace{space, a_, "sg{" + std::to_string(m_) + "}"};
}

Vector harmonic_extension(const std::array<double, 3>& boundary, int m) {
  return SGLevel(m).harmonic(boundary);
}

double sg_energy(const Vector& f, int m) { return SGLevel(m).energy(f); }

double sg_energy_bilinear(const Vector& f, const Vector& g, int m) {
  return SGLevel(m).energy_bilinear(f, g);
}

KusuokaWeights kusuoka_weights(int m) {
  if (m < 1) throw DomainError("Kusuoka weights need level >= 1");
  SGLevel l(m);
  return {l.cell_weights(), l.vertex_weights()};
}

Vector SGField::gamma(const Vector& f, const Vector& g) const {
  return level_->cell_energy(f, g).cwiseQuotient(level_->cell_weights());
}

bool SGField::is_constant(const Vector& f) const {
  for (Index i = 1; i < f.size(); ++i) {
    if (f[i] != f[0]) return false;
  }
  return true;
}

}  // namespace dcx::spaces
