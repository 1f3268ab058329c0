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

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dcx/error.hpp"

namespace dcx::kas {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Tuple = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultTupleCap = 2'000'000;

/// Discrete (X, rho, mu): distance matrix plus strictly positive weights.
class FiniteMetricMeasureSpace {
 public:
  /// The O(n^3) triangle check can be skipped for metrics that hold by
  /// construction (e.g. effective resistance).
  FiniteMetricMeasureSpace(Matrix dist, Vector mu,
                           std::optional<Matrix> points = std::nullopt,
                           bool check_triangle = true);
  /// Euclidean distances between the rows of `points`; mu defaults to ones.
  static FiniteMetricMeasureSpace from_points(const Matrix& points,
                                              std::optional<Vector> mu = std::nullopt);

  std::size_t size() const { return static_cast<std::size_t>(mu_.size()); }
  const Matrix& dist() const { return dist_; }
  double dist(std::size_t i, std::size_t j) const {
    return dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Vector& mu() const { return mu_; }
  const std::optional<Matrix>& points() const { return points_; }
  double diameter() const;
  /// Smallest off-diagonal distance; infinity for one point.
  double min_distance() const;

 private:
  Matrix dist_;
  Vector mu_;
  std::optional<Matrix> points_;
};

/// True iff every pairwise distance inside the tuple is < eps.
bool in_neighborhood(const Tuple& t, double eps, const FiniteMetricMeasureSpace& space);

/// Sorts t in place; returns the permutation sign, or 0 on a repeated index.
int sort_with_sign(Tuple& t);

// ---------------------------------------------------------------------------
// Raw multivariate functions on X^k (dense), generic in the scalar type.

template <class T>
class MultiFunction {
 public:
  MultiFunction(std::size_t n, std::size_t arity, T fill = T(0))
      : n_(n), arity_(arity), values_(ipow(n, arity), fill) {}

  std::size_t n() const { return n_; }
  std::size_t arity() const { return arity_; }
  std::size_t flat_size() const { return values_.size(); }

  std::size_t flat(const Tuple& t) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < arity_; ++i) k = k * n_ + t[i];
    return k;
  }
  Tuple unflat(std::size_t k) const {
    Tuple t(arity_);
    for (std::size_t i = arity_; i-- > 0;) {
      t[i] = k % n_;
      k /= n_;
    }
    return t;
  }

  T& operator[](const Tuple& t) { return values_[flat(t)]; }
  const T& operator[](const Tuple& t) const { return values_[flat(t)]; }
  T& at_flat(std::size_t k) { return values_[k]; }
  const T& at_flat(std::size_t k) const { return values_[k]; }
  const std::vector<T>& values() const { return values_; }

  /// f_1 (x) f_2 (x) ... (x) f_k
  static MultiFunction tensor(const std::vector<std::vector<T>>& fs) {
    if (fs.empty()) throw DimensionError("tensor of zero functions");
    std::size_t n = fs.front().size();
    MultiFunction out(n, fs.size());
    for (std::size_t k = 0; k < out.flat_size(); ++k) {
      Tuple t = out.unflat(k);
      T v = fs[0][t[0]];
      for (std::size_t i = 1; i < fs.size(); ++i) v *= fs[i][t[i]];
      out.values_[k] = v;
    }
    return out;
  }

  MultiFunction& operator+=(const MultiFunction& o) {
    check_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  MultiFunction& operator-=(const MultiFunction& o) {
    check_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  MultiFunction& operator*=(const T& s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  /// Pointwise product.
  MultiFunction& hadamard(const MultiFunction& o) {
    check_same(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= o.values_[k];
    return *this;
  }

  friend MultiFunction operator+(MultiFunction a, const MultiFunction& b) { return a += b; }
  friend MultiFunction operator-(MultiFunction a, const MultiFunction& b) { return a -= b; }
  friend MultiFunction operator*(MultiFunction a, const T& s) { return a *= s; }

 private:
  static std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
  }
  void check_same(const MultiFunction& o) const {
    if (o.n_ != n_ || o.arity_ != arity_) throw DimensionError("multifunction shape mismatch");
  }

  std::size_t n_;
  std::size_t arity_;
  std::vector<T> values_;
};

namespace detail {

struct Permutation {
  std::vector<std::size_t> perm;
  int sign;
};

const std::vector<Permutation>& permutations(std::size_t k);

}  // namespace detail

/// (1/k!) sum_sigma sgn(sigma) F o sigma.
template <class T>
MultiFunction<T> alt(const MultiFunction<T>& f) {
  const std::size_t k = f.arity();
  const std::size_t n = f.n();
  MultiFunction<T> out(n, k);
  if (k == 0) {
    out.at_flat(0) = f.at_flat(0);
    return out;
  }
  const auto& perms = detail::permutations(k);
  T factorial(1);
  for (std::size_t i = 2; i <= k; ++i) factorial *= T(static_cast<long>(i));
  // antisymmetric result: compute on increasing tuples, spread by sign
  std::map<Tuple, T> sorted_values;
  Tuple s(k);
  for (std::size_t flat = 0; flat < out.flat_size(); ++flat) {
    Tuple t = out.unflat(flat);
    Tuple sorted = t;
    int sign = sort_with_sign(sorted);
    if (sign == 0) continue;
    auto it = sorted_values.find(sorted);
    if (it == sorted_values.end()) {
      T acc(0);
      for (const auto& p : perms) {
        for (std::size_t i = 0; i < k; ++i) s[i] = sorted[p.perm[i]];
        if (p.sign > 0) {
          acc += f[s];
        } else {
          acc -= f[s];
        }
      }
      acc /= factorial;
      it = sorted_values.emplace(sorted, acc).first;
    }
    out.at_flat(flat) = sign > 0 ? it->second : T(-it->second);
  }
  return out;
}

/// Raw coboundary X^k -> X^{k+1}: sum_i (-1)^i F(..., x_i omitted, ...).
template <class T>
MultiFunction<T> coboundary(const MultiFunction<T>& f) {
  const std::size_t k = f.arity();
  MultiFunction<T> out(f.n(), k + 1);
  Tuple face(k);
  for (std::size_t flat = 0; flat < out.flat_size(); ++flat) {
    Tuple t = out.unflat(flat);
    T acc(0);
    for (std::size_t i = 0; i <= k; ++i) {
      for (std::size_t a = 0, b = 0; a <= k; ++a) {
        if (a != i) face[b++] = t[a];
      }
      if (i % 2 == 0) {
        acc += f[face];
      } else {
        acc -= f[face];
      }
    }
    out.at_flat(flat) = acc;
  }
  return out;
}

/// Determinant by permutation expansion; exact for exact scalar types.
template <class T>
T leibniz_det(const std::vector<std::vector<T>>& m) {
  const std::size_t k = m.size();
  if (k == 0) return T(1);
  T acc(0);
  for (const auto& p : detail::permutations(k)) {
    T prod(1);
    for (std::size_t i = 0; i < k; ++i) prod *= m[i][p.perm[i]];
    if (p.sign > 0) {
      acc += prod;
    } else {
      acc -= prod;
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Elementary representations (g, [f_1 .. f_p]).

template <class Fn>
struct ElementaryTerm {
  Fn g;
  std::vector<Fn> fs;
  double coeff = 1.0;
};

template <class Fn>
class ElementaryCochain {
 public:
  explicit ElementaryCochain(std::size_t p) : p_(p) {}

  std::size_t p() const { return p_; }
  const std::vector<ElementaryTerm<Fn>>& terms() const { return terms_; }

  ElementaryCochain& add_term(Fn g, std::vector<Fn> fs, double coeff = 1.0) {
    if (fs.size() != p_) {
      throw DimensionError("elementary term has " + std::to_string(fs.size()) +
                           " functions, degree is " + std::to_string(p_));
    }
    terms_.push_back(ElementaryTerm<Fn>{std::move(g), std::move(fs), coeff});
    return *this;
  }
  ElementaryCochain& operator+=(const ElementaryCochain& o) {
    if (o.p_ != p_) throw DimensionError("elementary cochain degree mismatch");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }

 private:
  std::size_t p_;
  std::vector<ElementaryTerm<Fn>> terms_;
};

/// Representation of delta_p F: each term (g, [f..]) becomes (one, [g, f..]).
template <class Fn>
ElementaryCochain<Fn> coboundary_representation(const ElementaryCochain<Fn>& f,
                                                const Fn& one) {
  ElementaryCochain<Fn> out(f.p() + 1);
  for (const auto& t : f.terms()) {
    std::vector<Fn> fs;
    fs.reserve(t.fs.size() + 1);
    fs.push_back(t.g);
    fs.insert(fs.end(), t.fs.begin(), t.fs.end());
    out.add_term(one, std::move(fs), t.coeff);
  }
  return out;
}

/// mean(g over tuple) * (1/p!) * det[f_i(x_j) - f_i(x_0)], generic scalar.
template <class T>
T eval_elementary_exact(const std::vector<T>& g, const std::vector<std::vector<T>>& fs,
                        const Tuple& t) {
  const std::size_t p = fs.size();
  if (t.size() != p + 1) throw DimensionError("tuple length must be p+1");
  T gbar(0);
  for (std::size_t i : t) gbar += g[i];
  gbar /= T(static_cast<long>(p + 1));
  std::vector<std::vector<T>> m(p, std::vector<T>(p));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) m[i][j] = fs[i][t[j + 1]] - fs[i][t[0]];
  }
  T fact(1);
  for (std::size_t i = 2; i <= p; ++i) fact *= T(static_cast<long>(i));
  return gbar * leibniz_det(m) / fact;
}

double eval_elementary(const ElementaryTerm<Vector>& term, const Tuple& t);
double eval_elementary(const ElementaryCochain<Vector>& f, const Tuple& t);

// ---------------------------------------------------------------------------
// Diagonal neighborhoods and dense cochains.

/// Strictly increasing tuples inside N_p(eps) for p = 0..p_max.
class NeighborhoodBasis {
 public:
  NeighborhoodBasis(std::shared_ptr<const FiniteMetricMeasureSpace> space, double eps,
                    std::size_t p_max, std::size_t cap = kDefaultTupleCap);

  const FiniteMetricMeasureSpace& space() const { return *space_; }
  std::shared_ptr<const FiniteMetricMeasureSpace> space_ptr() const { return space_; }
  double eps() const { return eps_; }
  std::size_t p_max() const { return levels_.size() - 1; }
  std::size_t count(std::size_t p) const { return level(p).tuples.size(); }
  const std::vector<Tuple>& tuples(std::size_t p) const { return level(p).tuples; }
  /// Index of an increasing tuple of length p+1, if present.
  std::optional<std::size_t> index(const Tuple& sorted) const;

 private:
  struct Level {
    std::vector<Tuple> tuples;
    std::map<Tuple, std::size_t> lookup;
  };
  const Level& level(std::size_t p) const;

  std::shared_ptr<const FiniteMetricMeasureSpace> space_;
  double eps_;
  std::vector<Level> levels_;
};

/// Antisymmetric function on N_p(eps), stored on increasing tuples.
class Cochain {
 public:
  Cochain(std::shared_ptr<const NeighborhoodBasis> basis, std::size_t p);

  static Cochain from_function(std::shared_ptr<const NeighborhoodBasis> basis,
                               std::size_t p,
                               const std::function<double(const Tuple&)>& f);

  std::size_t p() const { return p_; }
  double eps() const { return basis_->eps(); }
  const NeighborhoodBasis& basis() const { return *basis_; }
  std::shared_ptr<const NeighborhoodBasis> basis_ptr() const { return basis_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Value on an arbitrary tuple: sign from sorting, 0 on repeats.
  double value(const Tuple& t) const;

  Cochain& operator+=(const Cochain& o);
  Cochain& operator*=(double s);

 private:
  std::shared_ptr<const NeighborhoodBasis> basis_;
  std::size_t p_;
  std::vector<double> values_;
};

Cochain coboundary(const Cochain& f, double eps);

Cochain materialize(const ElementaryCochain<Vector>& f,
                    std::shared_ptr<const NeighborhoodBasis> basis);

/// dim H^p for p = 0..p_max at scale eps, exact rational ranks.
std::vector<std::size_t> kas_cohomology_dims(const FiniteMetricMeasureSpace& space,
                                             double eps, std::size_t p_max,
                                             std::size_t cap = kDefaultTupleCap);

/// Rank of a sparse integer matrix over the rationals. Entries are
/// (row, col, value) triplets.
struct IntEntry {
  std::size_t row;
  std::size_t col;
  long value;
};
std::size_t rational_rank(std::size_t rows, std::size_t cols,
                          const std::vector<IntEntry>& entries);

}  // namespace dcx::kas
