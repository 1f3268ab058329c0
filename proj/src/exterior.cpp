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

#include "dcx/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcx/error.hpp"

namespace dcx::exterior {
namespace {

void check_factor_dims(const std::vector<Vector>& factors, std::size_t dim) {
  for (const auto& f : factors) {
    if (static_cast<std::size_t>(f.size()) != dim) {
      throw DimensionError("p-vector factor has length " + std::to_string(f.size()) +
                           ", expected " + std::to_string(dim));
    }
  }
}

// visit increasing k-subsets of {0..n-1}
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

InnerSpace::InnerSpace(Matrix gram, double tol_psd)
    : gram_(std::move(gram)), tol_psd_(tol_psd) {
  if (gram_.rows() != gram_.cols() || gram_.rows() == 0) {
    throw DimensionError("gram matrix must be square and nonempty");
  }
  double scale = std::max(1.0, gram_.cwiseAbs().maxCoeff());
  if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("gram matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol_psd_) {
    throw DomainError("gram matrix is not positive semidefinite");
  }
}

InnerSpace InnerSpace::euclidean(std::size_t dim) {
  return InnerSpace(Matrix::Identity(dim, dim));
}

double InnerSpace::inner(const Vector& a, const Vector& b) const {
  return a.dot(gram_ * b);
}

Matrix InnerSpace::frame() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
  const auto& lam = es.eigenvalues();
  const auto& vec = es.eigenvectors();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam[k] > tol_psd_) keep.push_back(k);
  }
  Matrix out(gram_.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = vec.col(keep[c]) * std::sqrt(lam[keep[c]]);
  }
  return out;
}

PVector PVector::scalar(double c, std::size_t dim) {
  PVector v(0, dim);
  v.terms_.push_back(Term{c, {}});
  return v;
}

PVector PVector::decomposable(std::vector<Vector> factors, double coeff) {
  if (factors.empty()) {
    throw DimensionError("decomposable needs at least one factor; use scalar()");
  }
  std::size_t dim = static_cast<std::size_t>(factors.front().size());
  PVector v(factors.size(), dim);
  v.add_term(coeff, std::move(factors));
  return v;
}

PVector PVector::basis(const std::vector<std::size_t>& idx, std::size_t dim,
                       double coeff) {
  if (idx.empty()) return scalar(coeff, dim);
  std::vector<Vector> factors;
  for (std::size_t i : idx) {
    if (i >= dim) throw DimensionError("basis index out of range");
    factors.push_back(Vector::Unit(static_cast<Eigen::Index>(dim),
                                   static_cast<Eigen::Index>(i)));
  }
  return decomposable(std::move(factors), coeff);
}

PVector& PVector::add_term(double coeff, std::vector<Vector> factors) {
  if (factors.size() != degree_) {
    throw DimensionError("term has " + std::to_string(factors.size()) +
                         " factors, degree is " + std::to_string(degree_));
  }
  check_factor_dims(factors, dim_);
  terms_.push_back(Term{coeff, std::move(factors)});
  return *this;
}

PVector& PVector::operator+=(const PVector& other) {
  if (other.degree_ != degree_ || other.dim_ != dim_) {
    throw DimensionError("p-vector sum needs equal degree and dimension");
  }
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PVector PVector::operator+(const PVector& other) const {
  PVector out = *this;
  out += other;
  return out;
}

PVector PVector::operator-(const PVector& other) const { return *this + other * -1.0; }

PVector PVector::operator*(double s) const {
  PVector out = *this;
  for (auto& t : out.terms_) t.coeff *= s;
  return out;
}

double determinant(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw DimensionError("determinant of non-square matrix");
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.partialPivLu().determinant();
  }
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double wedge_inner(const PVector& v, const PVector& w, const InnerSpace& s) {
  if (v.degree() != w.degree()) {
    throw DimensionError("wedge_inner degree mismatch: " + std::to_string(v.degree()) +
                         " vs " + std::to_string(w.degree()));
  }
  if (v.dim() != s.dim() || w.dim() != s.dim()) {
    throw DimensionError("wedge_inner dimension mismatch");
  }
  const std::size_t p = v.degree();
  const Matrix& g = s.gram();
  double total = 0.0;
  Matrix cross(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (const auto& a : v.terms()) {
    std::vector<Vector> ga;
    ga.reserve(p);
    for (const auto& f : a.factors) ga.push_back(g * f);
    for (const auto& b : w.terms()) {
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              ga[i].dot(b.factors[j]);
        }
      }
      total += a.coeff * b.coeff * determinant(cross);
    }
  }
  return total;
}

PVector wedge_product(const PVector& v, const PVector& w) {
  if (v.dim() != w.dim()) throw DimensionError("wedge_product dimension mismatch");
  PVector out(v.degree() + w.degree(), v.dim());
  for (const auto& a : v.terms()) {
    for (const auto& b : w.terms()) {
      std::vector<Vector> factors = a.factors;
      factors.insert(factors.end(), b.factors.begin(), b.factors.end());
      out.add_term(a.coeff * b.coeff, std::move(factors));
    }
  }
  return out;
}

double pvector_norm(const PVector& v, const InnerSpace& s) {
  double q = wedge_inner(v, v, s);
  if (q >= 0.0) return std::sqrt(q);
  if (q >= -kNormClamp) return 0.0;
  throw NumericalError("negative squared p-vector norm " + std::to_string(q));
}

Vector minor_coordinates(const PVector& v, const InnerSpace& s) {
  if (v.dim() != s.dim()) throw DimensionError("minor_coordinates dimension mismatch");
  const std::size_t p = v.degree();
  Matrix frame = s.frame();
  const std::size_t r = static_cast<std::size_t>(frame.cols());
  if (p == 0) {
    double c = 0.0;
    for (const auto& t : v.terms()) c += t.coeff;
    return Vector::Constant(1, c);
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(binomial(r, p)));
  if (p > r) return out;
  Matrix sub(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (const auto& t : v.terms()) {
    std::vector<Vector> coords;
    coords.reserve(p);
    for (const auto& f : t.factors) coords.push_back(frame.transpose() * f);
    Eigen::Index slot = 0;
    for_each_subset(r, p, [&](const std::vector<std::size_t>& idx) {
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              coords[i][static_cast<Eigen::Index>(idx[j])];
        }
      }
      out[slot++] += t.coeff * determinant(sub);
    });
  }
  return out;
}

}  // namespace dcx::exterior
