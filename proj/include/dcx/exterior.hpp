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
#include <vector>

#include <Eigen/Dense>

namespace dcx::exterior {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kTolPsd = 1e-10;
inline constexpr double kNormClamp = 1e-12;

/// Finite-dimensional inner product given by the Gram matrix of a fixed
/// generating family. Rank-deficient grams are accepted.
class InnerSpace {
 public:
  explicit InnerSpace(Matrix gram, double tol_psd = kTolPsd);
  static InnerSpace euclidean(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  double tol_psd() const { return tol_psd_; }
  double inner(const Vector& a, const Vector& b) const;

  /// Rows are coordinates of the generators in an orthonormal frame of the
  /// quotient by null vectors; eigenvalues below tol_psd are dropped.
  Matrix frame() const;

 private:
  Matrix gram_;
  double tol_psd_;
};

struct Term {
  double coeff = 1.0;
  std::vector<Vector> factors;
};

/// Finite sum of decomposable p-vectors, coordinates over the generators.
class PVector {
 public:
  PVector(std::size_t degree, std::size_t dim) : degree_(degree), dim_(dim) {}

  static PVector scalar(double c, std::size_t dim);
  static PVector decomposable(std::vector<Vector> factors, double coeff = 1.0);
  /// coeff * e_{i1} ^ ... ^ e_{ip}
  static PVector basis(const std::vector<std::size_t>& idx, std::size_t dim,
                       double coeff = 1.0);

  std::size_t degree() const { return degree_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  PVector& add_term(double coeff, std::vector<Vector> factors);
  PVector& operator+=(const PVector& other);
  PVector operator+(const PVector& other) const;
  PVector operator-(const PVector& other) const;
  PVector operator*(double s) const;

 private:
  std::size_t degree_;
  std::size_t dim_;
  std::vector<Term> terms_;
};

/// Determinant with exact zero for a zero row or column when n <= 3.
double determinant(const Matrix& m);

std::size_t binomial(std::size_t n, std::size_t k);

/// Gram-determinant pairing extended bilinearly over terms.
double wedge_inner(const PVector& v, const PVector& w, const InnerSpace& s);

PVector wedge_product(const PVector& v, const PVector& w);

double pvector_norm(const PVector& v, const InnerSpace& s);

/// Coordinates of v in the induced orthonormal basis of the p-th exterior
/// power of the frame from InnerSpace::frame (increasing index subsets).
Vector minor_coordinates(const PVector& v, const InnerSpace& s);

}  // namespace dcx::exterior
