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

#include "dcx/spaces/product_sg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcx/error.hpp"

namespace dcx::spaces {
namespace {

using Index = Eigen::Index;
Index ix(std::size_t i) { return static_cast<Index>(i); }

bool constant_vector(const Vector& v) {
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] != v[0]) return false;
  }
  return true;
}

}  // namespace

TensorSum TensorSum::pure(Vector a, Vector b, double coeff) {
  TensorSum s;
  s.terms_.push_back(TensorTerm{coeff, std::move(a), std::move(b)});
  return s;
}

TensorSum& TensorSum::operator+=(const TensorSum& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

bool TensorSum::operator==(const TensorSum& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const TensorTerm& x = terms_[i];
    const TensorTerm& y = o.terms_[i];
    if (x.coeff != y.coeff || x.a.size() != y.a.size() || x.b.size() != y.b.size()) return false;
    if (x.a != y.a || x.b != y.b) return false;
  }
  return true;
}

Matrix TensorSum::to_matrix(std::size_t n1, std::size_t n2) const {
  Matrix u = Matrix::Zero(ix(n1), ix(n2));
  for (const TensorTerm& t : terms_) {
    if (t.a.size() != ix(n1) || t.b.size() != ix(n2)) {
      throw DimensionError("tensor factor sizes do not match the product space");
    }
    u += t.coeff * t.a * t.b.transpose();
  }
  return u;
}

ProductSG::ProductSG(int m1, int m2) {
  if (m1 != m2) {
    throw DimensionError("product gasket factors must share a level (got " + std::to_string(m1) +
                         " and " + std::to_string(m2) + ")");
  }
  f1_ = std::make_shared<const SGLevel>(m1);
  f2_ = f1_;
  g1_ = std::make_shared<const SpectralGenerator>(f1_->stiffness(), f1_->vertex_weights());
  g2_ = g1_;
}

double ProductSG::mass(std::size_t x) const {
  const std::size_t n2 = f2_->vertex_count();
  return f1_->vertex_weights()[ix(x / n2)] * f2_->vertex_weights()[ix(x % n2)];
}

KroneckerKernel::KroneckerKernel(const ProductSG& space, double t)
    : space_(&space),
      t_(t),
      n1_(space.factor(0).vertex_count()),
      n2_(space.factor(1).vertex_count()) {
  if (!(t > 0.0)) throw DomainError("heat time must be positive");
  p1_ = space.generator(0).transition(t);
  p2_ = &space.generator(1) == &space.generator(0) ? p1_ : space.generator(1).transition(t);
  r1_ = p1_.rowwise().sum();
  r2_ = p2_.rowwise().sum();
}

double KroneckerKernel::entry(std::size_t x, std::size_t y) const {
  if (x == y) return 0.0;
  return p1_(ix(x / n2_), ix(y / n2_)) * p2_(ix(x % n2_), ix(y % n2_)) / (2.0 * t_);
}

double KroneckerKernel::symmetry_residual() const {
  const Vector& nu1 = space_->factor(0).vertex_weights();
  const Vector& nu2 = space_->factor(1).vertex_weights();
  const double s = 1.0 / (2.0 * t_);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t x1 = 0; x1 < n1_; ++x1) {
    for (std::size_t y1 = 0; y1 < n1_; ++y1) {
      double a = nu1[ix(x1)] * p1_(ix(x1), ix(y1)) * s;
      double ar = nu1[ix(y1)] * p1_(ix(y1), ix(x1)) * s;
      for (std::size_t x2 = 0; x2 < n2_; ++x2) {
        for (std::size_t y2 = 0; y2 < n2_; ++y2) {
          if (x1 == y1 && x2 == y2) continue;
          double u = a * nu2[ix(x2)] * p2_(ix(x2), ix(y2));
          double v = ar * nu2[ix(y2)] * p2_(ix(y2), ix(x2));
          scale = std::max(scale, std::abs(u));
          worst = std::max(worst, std::abs(u - v));
        }
      }
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

double KroneckerKernel::conservativity_residual() const {
  double worst = 0.0;
  for (std::size_t x1 = 0; x1 < n1_; ++x1) {
    for (std::size_t x2 = 0; x2 < n2_; ++x2) {
      double row = 0.0;
      for (std::size_t y1 = 0; y1 < n1_; ++y1) {
        double a = p1_(ix(x1), ix(y1));
        double inner = 0.0;
        for (std::size_t y2 = 0; y2 < n2_; ++y2) inner += p2_(ix(x2), ix(y2));
        row += a * inner;
      }
      worst = std::max(worst, std::abs(row - 1.0));
    }
  }
  return worst;
}

Matrix KroneckerKernel::gamma(const Matrix& u, const Matrix& v) const {
  if (u.rows() != ix(n1_) || u.cols() != ix(n2_) || v.rows() != ix(n1_) || v.cols() != ix(n2_)) {
    throw DimensionError("product function must be an n1 x n2 matrix");
  }
  const double s = 1.0 / (2.0 * t_);
  Matrix uv = u.cwiseProduct(v);
  Matrix puv = p1_ * uv * p2_.transpose();
  Matrix pu = p1_ * u * p2_.transpose();
  Matrix pv = p1_ * v * p2_.transpose();
  Matrix rr = r1_ * r2_.transpose();
  return s * (puv - u.cwiseProduct(pv) - v.cwiseProduct(pu) + uv.cwiseProduct(rr));
}

Matrix KroneckerKernel::gamma(const TensorSum& f, const TensorSum& g) const {
  return gamma(f.to_matrix(n1_, n2_), g.to_matrix(n1_, n2_));
}

double KroneckerKernel::energy(const TensorSum& f) const {
  Matrix g = gamma(f, f);
  const Vector& nu1 = space_->factor(0).vertex_weights();
  const Vector& nu2 = space_->factor(1).vertex_weights();
  return nu1.dot(g * nu2);
}

ProductField::ProductField(const ProductSG& space)
    : space_(&space),
      c1_(space.factor(0).cell_count()),
      c2_(space.factor(1).cell_count()),
      s1_(space.factor(0)),
      s2_(space.factor(1)) {}

double ProductField::weight(std::size_t w) const {
  return space_->factor(0).cell_weights()[ix(w / c2_)] *
         space_->factor(1).cell_weights()[ix(w % c2_)];
}

Vector ProductField::values(const TensorSum& f) const {
  Matrix u = Matrix::Zero(ix(c1_), ix(c2_));
  for (const TensorTerm& t : f.terms()) {
    u += t.coeff * s1_.values(t.a) * s2_.values(t.b).transpose();
  }
  // row-major flattening: cell (w1, w2) -> w1 * c2 + w2
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = u;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

Vector ProductField::gamma(const TensorSum& f, const TensorSum& g) const {
  Matrix u = Matrix::Zero(ix(c1_), ix(c2_));
  for (const TensorTerm& x : f.terms()) {
    Vector ma = s1_.values(x.a);
    Vector mb = s2_.values(x.b);
    for (const TensorTerm& y : g.terms()) {
      double c = x.coeff * y.coeff;
      Vector mc = s1_.values(y.a);
      Vector md = s2_.values(y.b);
      u += c * (ma.cwiseProduct(mc) * s2_.gamma(x.b, y.b).transpose() +
                s1_.gamma(x.a, y.a) * mb.cwiseProduct(md).transpose());
    }
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = u;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

TensorSum ProductField::one() const {
  return TensorSum::pure(Vector::Ones(ix(space_->factor(0).vertex_count())),
                         Vector::Ones(ix(space_->factor(1).vertex_count())));
}

bool ProductField::is_constant(const TensorSum& f) const {
  for (const TensorTerm& t : f.terms()) {
    if (!constant_vector(t.a) || !constant_vector(t.b)) return false;
  }
  return true;
}

}  // namespace dcx::spaces
