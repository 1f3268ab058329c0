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

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dcx/spaces/finite.hpp"
#include "dcx/spaces/sg.hpp"

namespace dcx::spaces {

struct TensorTerm {
  double coeff = 1.0;
  Vector a;  // factor 1 vertex values
  Vector b;  // factor 2 vertex values
};

/// Finite sum of pure tensors a (x) b on SG x SG.
class TensorSum {
 public:
  TensorSum() = default;
  static TensorSum pure(Vector a, Vector b, double coeff = 1.0);

  const std::vector<TensorTerm>& terms() const { return terms_; }
  TensorSum& operator+=(const TensorSum& o);
  friend TensorSum operator+(TensorSum a, const TensorSum& b) { return a += b; }
  friend TensorSum operator*(double s, TensorSum a) {
    for (auto& t : a.terms_) t.coeff *= s;
    return a;
  }
  bool operator==(const TensorSum& o) const;

  /// U[x1][x2] = sum c a(x1) b(x2)
  Matrix to_matrix(std::size_t n1, std::size_t n2) const;

 private:
  std::vector<TensorTerm> terms_;
};

/// Two gasket factors at the same level with product measure nu1 (x) nu2.
class ProductSG {
 public:
  ProductSG(int m1, int m2);

  const SGLevel& factor(int i) const { return i == 0 ? *f1_ : *f2_; }
  const SpectralGenerator& generator(int i) const { return i == 0 ? *g1_ : *g2_; }
  std::size_t size() const { return f1_->vertex_count() * f2_->vertex_count(); }
  /// Product vertex weight of x = x1 * n2 + x2.
  double mass(std::size_t x) const;

 private:
  std::shared_ptr<const SGLevel> f1_, f2_;
  std::shared_ptr<const SpectralGenerator> g1_, g2_;
};

/// Product heat kernel j_t = (P1 (x) P2) / (2t) off the diagonal, kept in
/// factored form.
class KroneckerKernel {
 public:
  KroneckerKernel(const ProductSG& space, double t);

  double t() const { return t_; }
  std::size_t size() const { return n1_ * n2_; }
  double entry(std::size_t x, std::size_t y) const;
  const Matrix& transition(int i) const { return i == 0 ? p1_ : p2_; }

  /// max |mu(x) j(x, y) - mu(y) j(y, x)| / max mu(x) j(x, y) over all pairs.
  double symmetry_residual() const;
  /// max |sum_y P_t(x, y) - 1|
  double conservativity_residual() const;

  /// Gamma_t(F, G) on product vertices, as an n1 x n2 matrix.
  Matrix gamma(const Matrix& u, const Matrix& v) const;
  Matrix gamma(const TensorSum& f, const TensorSum& g) const;
  double energy(const TensorSum& f) const;

 private:
  const ProductSG* space_;
  double t_;
  std::size_t n1_, n2_;
  Matrix p1_, p2_;
  Vector r1_, r2_;
};

/// Cell field on SG x SG: cells (w1, w2) with weight nu1(w1) nu2(w2) and
/// Gamma(a (x) b, c (x) d) = mean(a) mean(c) Gamma2(b, d) + mean(b) mean(d) Gamma1(a, c).
class ProductField {
 public:
  using Function = TensorSum;
  explicit ProductField(const ProductSG& space);

  std::size_t size() const { return c1_ * c2_; }
  double weight(std::size_t w) const;
  Vector values(const TensorSum& f) const;
  Vector gamma(const TensorSum& f, const TensorSum& g) const;
  TensorSum one() const;
  bool is_constant(const TensorSum& f) const;
  bool equal(const TensorSum& a, const TensorSum& b) const { return a == b; }

 private:
  const ProductSG* space_;
  std::size_t c1_, c2_;
  SGField s1_, s2_;
};

/// Product carre du champ of two tensor sums on product cells.
inline Vector product_carre(const ProductField& field, const TensorSum& f, const TensorSum& g) {
  return field.gamma(f, g);
}

}  // namespace dcx::spaces
