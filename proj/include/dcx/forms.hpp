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

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcx/error.hpp"
#include "dcx/exterior.hpp"
#include "dcx/kas.hpp"
#include "dcx/parallel.hpp"

namespace dcx::forms {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Backend giving Gamma(f, g) as values on weighted points or cells.
template <class F>
concept CarreField = requires(const F& field, const typename F::Function& f, std::size_t i) {
  { field.size() } -> std::convertible_to<std::size_t>;
  { field.weight(i) } -> std::convertible_to<double>;
  { field.values(f) } -> std::convertible_to<Vector>;
  { field.gamma(f, f) } -> std::convertible_to<Vector>;
  { field.one() } -> std::convertible_to<typename F::Function>;
  { field.is_constant(f) } -> std::convertible_to<bool>;
  { field.equal(f, f) } -> std::convertible_to<bool>;
};

template <class Fn>
struct FormTerm {
  Fn g;
  std::vector<Fn> fs;
  double coeff = 1.0;
};

/// Formal sum of terms coeff * g d0 f1 ^ ... ^ d0 fp.
template <class Fn>
class ElementaryForm {
 public:
  explicit ElementaryForm(std::size_t p) : p_(p) {}

  std::size_t p() const { return p_; }
  const std::vector<FormTerm<Fn>>& terms() const { return terms_; }

  ElementaryForm& add_term(Fn g, std::vector<Fn> fs, double coeff = 1.0) {
    if (fs.size() != p_) {
      throw DimensionError("form term has " + std::to_string(fs.size()) +
                           " differentials, degree is " + std::to_string(p_));
    }
    terms_.push_back(FormTerm<Fn>{std::move(g), std::move(fs), coeff});
    return *this;
  }
  ElementaryForm& operator+=(const ElementaryForm& o) {
    check_degree(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }
  ElementaryForm& operator-=(const ElementaryForm& o) {
    check_degree(o);
    for (const auto& t : o.terms_) terms_.push_back(FormTerm<Fn>{t.g, t.fs, -t.coeff});
    return *this;
  }
  ElementaryForm& operator*=(double s) {
    for (auto& t : terms_) t.coeff *= s;
    return *this;
  }
  friend ElementaryForm operator+(ElementaryForm a, const ElementaryForm& b) { return a += b; }
  friend ElementaryForm operator-(ElementaryForm a, const ElementaryForm& b) { return a -= b; }

 private:
  void check_degree(const ElementaryForm& o) const {
    if (o.p_ != p_) throw DimensionError("form degree mismatch");
  }
  std::size_t p_;
  std::vector<FormTerm<Fn>> terms_;
};

namespace detail {

template <class Field>
using FnOf = typename Field::Function;

/// Distinct functions of a form list, compared with field.equal.
template <CarreField Field>
struct Dictionary {
  const Field* field;
  std::vector<FnOf<Field>> items;

  std::size_t id(const FnOf<Field>& f) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (field->equal(items[i], f)) return i;
    }
    items.push_back(f);
    return items.size() - 1;
  }
};

template <CarreField Field>
struct IndexedTerm {
  double coeff;
  std::size_t g;
  std::vector<std::size_t> fs;
};

/// Terms over dictionary ids with identical (g, fs) merged.
template <CarreField Field>
std::vector<IndexedTerm<Field>> index_terms(Dictionary<Field>& dict,
                                            const ElementaryForm<FnOf<Field>>& w) {
  std::vector<IndexedTerm<Field>> out;
  for (const auto& t : w.terms()) {
    // d0 of a constant vanishes
    bool flat = false;
    for (const auto& f : t.fs) flat = flat || dict.field->is_constant(f);
    if (flat) continue;
    IndexedTerm<Field> it{t.coeff, dict.id(t.g), {}};
    for (const auto& f : t.fs) it.fs.push_back(dict.id(f));
    bool merged = false;
    for (auto& o : out) {
      if (o.g == it.g && o.fs == it.fs) {
        o.coeff += it.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(it));
  }
  return out;
}

}  // namespace detail

/// x |-> sum over term pairs of g(x) k(x) det[Gamma(f_i, h_j)(x)].
template <CarreField Field>
Vector form_inner_density(const Field& field, const ElementaryForm<typename Field::Function>& w,
                          const ElementaryForm<typename Field::Function>& e) {
  if (w.p() != e.p()) throw DimensionError("form degree mismatch");
  const std::size_t n = field.size();
  const std::size_t p = w.p();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& s : w.terms()) {
    Vector gs = field.values(s.g);
    for (const auto& t : e.terms()) {
      Vector gt = field.values(t.g);
      std::vector<Vector> gam(p * p);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) gam[i * p + j] = field.gamma(s.fs[i], t.fs[j]);
      }
      const double c = s.coeff * t.coeff;
      std::vector<double> vals(n);
      parallel_for(n, [&](std::size_t x) {
        Matrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
        const auto xi = static_cast<Eigen::Index>(x);
        for (std::size_t i = 0; i < p; ++i) {
          for (std::size_t j = 0; j < p; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gam[i * p + j][xi];
          }
        }
        double det = p == 0 ? 1.0 : exterior::determinant(m);
        vals[x] = c * gs[xi] * gt[xi] * det;
      });
      for (std::size_t x = 0; x < n; ++x) out[static_cast<Eigen::Index>(x)] += vals[x];
    }
  }
  return out;
}

template <CarreField Field>
double form_inner_at(const Field& field, const ElementaryForm<typename Field::Function>& w,
                     const ElementaryForm<typename Field::Function>& e, std::size_t x) {
  if (x >= field.size()) throw DimensionError("form evaluation point out of range");
  return form_inner_density(field, w, e)[static_cast<Eigen::Index>(x)];
}

template <CarreField Field>
double integrate(const Field& field, const Vector& density) {
  const std::size_t n = field.size();
  std::vector<double> v(n);
  for (std::size_t x = 0; x < n; ++x) v[x] = field.weight(x) * density[static_cast<Eigen::Index>(x)];
  return tree_sum(v);
}

template <CarreField Field>
double form_l2_inner(const Field& field, const ElementaryForm<typename Field::Function>& w,
                     const ElementaryForm<typename Field::Function>& e) {
  return integrate(field, form_inner_density(field, w, e));
}

/// L2 norm through coordinates in an orthonormal frame of each fiber, so
/// terms that cancel symbolically give an exact zero.
template <CarreField Field>
double form_norm_l2(const Field& field, const ElementaryForm<typename Field::Function>& w) {
  detail::Dictionary<Field> dict{&field, {}};
  auto terms = detail::index_terms(dict, w);
  std::erase_if(terms, [](const auto& t) { return t.coeff == 0.0; });
  if (terms.empty()) return 0.0;
  const std::size_t n = field.size();
  const std::size_t p = w.p();
  const std::size_t k = dict.items.size();
  std::vector<Vector> vals(k);
  for (const auto& t : terms) {
    if (vals[t.g].size() == 0) vals[t.g] = field.values(dict.items[t.g]);
  }
  std::vector<std::vector<Vector>> gam(k, std::vector<Vector>(k));
  std::vector<bool> used(k, false);
  for (const auto& t : terms) {
    for (std::size_t f : t.fs) used[f] = true;
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k && used[a]; ++b) {
      if (used[b]) gam[a][b] = field.gamma(dict.items[a], dict.items[b]);
    }
  }
  std::vector<double> dens(n);
  parallel_for(n, [&](std::size_t x) {
    const auto xi = static_cast<Eigen::Index>(x);
    if (p == 0) {
      double s = 0.0;
      for (const auto& t : terms) s += t.coeff * vals[t.g][xi];
      dens[x] = s * s;
      return;
    }
    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        if (!used[a] || !used[b]) continue;
        double v = gam[a][b][xi];
        g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
      }
    }
    double scale = g.diagonal().cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      dens[x] = 0.0;
      return;
    }
    exterior::InnerSpace space(g / scale);
    exterior::PVector v(p, k);
    for (const auto& t : terms) {
      std::vector<Vector> fs;
      for (std::size_t f : t.fs) {
        fs.push_back(Vector::Unit(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(f)));
      }
      v.add_term(t.coeff * vals[t.g][xi], std::move(fs));
    }
    Vector c = exterior::minor_coordinates(v, space);
    dens[x] = c.squaredNorm() * std::pow(scale, static_cast<double>(p));
  });
  std::vector<double> weighted(n);
  for (std::size_t x = 0; x < n; ++x) weighted[x] = field.weight(x) * dens[x];
  return std::sqrt(std::max(0.0, tree_sum(weighted)));
}

/// g d0 f1 ^ ... ^ d0 fp |-> d0 g ^ d0 f1 ^ ... ^ d0 fp; constant g drops.
template <CarreField Field>
ElementaryForm<typename Field::Function> exterior_d(
    const Field& field, const ElementaryForm<typename Field::Function>& w) {
  ElementaryForm<typename Field::Function> out(w.p() + 1);
  for (const auto& t : w.terms()) {
    if (field.is_constant(t.g)) continue;
    std::vector<typename Field::Function> fs;
    fs.reserve(t.fs.size() + 1);
    fs.push_back(t.g);
    fs.insert(fs.end(), t.fs.begin(), t.fs.end());
    out.add_term(field.one(), std::move(fs), t.coeff);
  }
  return out;
}

/// Degree-0 form f, i.e. the function itself.
template <class Fn>
ElementaryForm<Fn> function_form(Fn f) {
  ElementaryForm<Fn> out(0);
  out.add_term(std::move(f), {});
  return out;
}

/// Termwise (g, [f..]) |-> g d0 f1 ^ ... ^ d0 fp.
template <class Fn>
ElementaryForm<Fn> localize(const kas::ElementaryCochain<Fn>& f) {
  ElementaryForm<Fn> out(f.p());
  for (const auto& t : f.terms()) out.add_term(t.g, t.fs, t.coeff);
  return out;
}

/// || d localize(F) - localize(delta F) ||_{L2}
template <CarreField Field>
double chain_map_residual(const Field& field,
                          const kas::ElementaryCochain<typename Field::Function>& f) {
  auto lhs = exterior_d(field, localize(f));
  auto rhs = localize(kas::coboundary_representation(f, field.one()));
  return form_norm_l2(field, lhs - rhs);
}

}  // namespace dcx::forms
