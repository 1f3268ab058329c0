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

#include "dcx/kas.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include <gmpxx.h>

#include "dcx/exterior.hpp"

namespace dcx::kas {

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(Matrix dist, Vector mu,
                                                   std::optional<Matrix> points,
                                                   bool check_triangle)
    : dist_(std::move(dist)), mu_(std::move(mu)), points_(std::move(points)) {
  const Eigen::Index n = mu_.size();
  if (n == 0) throw DimensionError("space needs at least one point");
  if (dist_.rows() != n || dist_.cols() != n) {
    throw DimensionError("distance matrix must be n x n with n = " + std::to_string(n));
  }
  if (points_ && points_->rows() != n) throw DimensionError("points row count mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mu_[i] > 0.0)) throw DomainError("weights must be strictly positive");
    if (dist_(i, i) != 0.0) throw DomainError("distance matrix must have zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(dist_(i, j) >= 0.0)) throw DomainError("distances must be nonnegative");
      if (dist_(i, j) != dist_(j, i)) throw DomainError("distance matrix must be symmetric");
    }
  }
  if (!check_triangle) return;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + 1e-12) {
          throw DomainError("triangle inequality violated at (" + std::to_string(i) + "," +
                            std::to_string(j) + "," + std::to_string(k) + ")");
        }
      }
    }
  }
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_points(const Matrix& points,
                                                               std::optional<Vector> mu) {
  const Eigen::Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = (points.row(i) - points.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  Vector w = mu ? *mu : Vector::Ones(n);
  return FiniteMetricMeasureSpace(std::move(d), std::move(w), points);
}

double FiniteMetricMeasureSpace::diameter() const { return dist_.maxCoeff(); }

double FiniteMetricMeasureSpace::min_distance() const {
  double m = std::numeric_limits<double>::infinity();
  const Eigen::Index n = dist_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) m = std::min(m, dist_(i, j));
  }
  return m;
}

bool in_neighborhood(const Tuple& t, double eps, const FiniteMetricMeasureSpace& space) {
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (t[a] >= space.size()) throw DimensionError("tuple index out of range");
    for (std::size_t b = a + 1; b < t.size(); ++b) {
      if (!(space.dist(t[a], t[b]) < eps)) return false;
    }
  }
  return true;
}

int sort_with_sign(Tuple& t) {
  int sign = 1;
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (std::size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
      if (t[j - 1] == t[j]) return 0;
      std::swap(t[j - 1], t[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i - 1] == t[i]) return 0;
  }
  return sign;
}

namespace detail {

const std::vector<Permutation>& permutations(std::size_t k) {
  static std::mutex mutex;
  static std::map<std::size_t, std::vector<Permutation>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<Permutation> out;
  std::vector<std::size_t> p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = i;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (p[i] > p[j]) sign = -sign;
      }
    }
    out.push_back(Permutation{p, sign});
  } while (std::next_permutation(p.begin(), p.end()));
  return cache.emplace(k, std::move(out)).first->second;
}

}  // namespace detail

double eval_elementary(const ElementaryTerm<Vector>& term, const Tuple& t) {
  const std::size_t p = term.fs.size();
  if (t.size() != p + 1) throw DimensionError("tuple length must be p+1");
  double gbar = 0.0;
  for (std::size_t i : t) gbar += term.g[static_cast<Eigen::Index>(i)];
  gbar /= static_cast<double>(p + 1);
  Matrix m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  const auto x0 = static_cast<Eigen::Index>(t[0]);
  double fact = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    fact *= static_cast<double>(i + 1);
    for (std::size_t j = 0; j < p; ++j) {
      const auto& f = term.fs[i];
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          f[static_cast<Eigen::Index>(t[j + 1])] - f[x0];
    }
  }
  return term.coeff * gbar * exterior::determinant(m) / fact;
}

double eval_elementary(const ElementaryCochain<Vector>& f, const Tuple& t) {
  double acc = 0.0;
  for (const auto& term : f.terms()) acc += eval_elementary(term, t);
  return acc;
}

NeighborhoodBasis::NeighborhoodBasis(std::shared_ptr<const FiniteMetricMeasureSpace> space,
                                     double eps, std::size_t p_max, std::size_t cap)
    : space_(std::move(space)), eps_(eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const std::size_t n = space_->size();
  // forward adjacency
  std::vector<std::vector<std::size_t>> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (space_->dist(i, j) < eps_) next[i].push_back(j);
    }
  }
  std::size_t total = 0;
  levels_.resize(p_max + 1);
  for (std::size_t i = 0; i < n; ++i) levels_[0].tuples.push_back({i});
  total += n;
  for (std::size_t p = 1; p <= p_max; ++p) {
    auto& cur = levels_[p].tuples;
    for (const Tuple& t : levels_[p - 1].tuples) {
      for (std::size_t c : next[t.back()]) {
        bool ok = true;
        for (std::size_t a = 0; a + 1 < t.size() && ok; ++a) ok = space_->dist(t[a], c) < eps_;
        if (!ok) continue;
        if (total + 1 > cap) {
          throw ResourceError("neighborhood tuple count exceeded at degree " + std::to_string(p),
                              total + 1, cap);
        }
        Tuple u = t;
        u.push_back(c);
        cur.push_back(std::move(u));
        ++total;
      }
    }
  }
  for (auto& lv : levels_) {
    for (std::size_t k = 0; k < lv.tuples.size(); ++k) lv.lookup.emplace(lv.tuples[k], k);
  }
}

const NeighborhoodBasis::Level& NeighborhoodBasis::level(std::size_t p) const {
  if (p >= levels_.size()) {
    throw DimensionError("neighborhood basis built up to degree " +
                         std::to_string(levels_.size() - 1) + ", requested " +
                         std::to_string(p));
  }
  return levels_[p];
}

std::optional<std::size_t> NeighborhoodBasis::index(const Tuple& sorted) const {
  if (sorted.empty()) return std::nullopt;
  const Level& lv = level(sorted.size() - 1);
  auto it = lv.lookup.find(sorted);
  if (it == lv.lookup.end()) return std::nullopt;
  return it->second;
}

Cochain::Cochain(std::shared_ptr<const NeighborhoodBasis> basis, std::size_t p)
    : basis_(std::move(basis)), p_(p), values_(basis_->count(p), 0.0) {}

Cochain Cochain::from_function(std::shared_ptr<const NeighborhoodBasis> basis,
                               std::size_t p,
                               const std::function<double(const Tuple&)>& f) {
  Cochain out(basis, p);
  const auto& tuples = out.basis_->tuples(p);
  for (std::size_t k = 0; k < tuples.size(); ++k) out.values_[k] = f(tuples[k]);
  return out;
}

double Cochain::value(const Tuple& t) const {
  if (t.size() != p_ + 1) throw DimensionError("cochain evaluated on a tuple of wrong length");
  Tuple s = t;
  int sign = sort_with_sign(s);
  if (sign == 0) {
    for (std::size_t i : t) {
      if (i >= basis_->space().size()) throw DimensionError("tuple index out of range");
    }
    return 0.0;
  }
  auto idx = basis_->index(s);
  if (!idx) throw DomainError("tuple outside N_p(eps)");
  return sign * values_[*idx];
}

Cochain& Cochain::operator+=(const Cochain& o) {
  if (o.basis_ != basis_ || o.p_ != p_) throw DimensionError("cochain sum needs a shared basis");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Cochain& Cochain::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Cochain coboundary(const Cochain& f, double eps) {
  if (eps != f.eps()) {
    throw DomainError("coboundary requested at eps " + std::to_string(eps) +
                      " for a cochain at eps " + std::to_string(f.eps()));
  }
  const std::size_t p = f.p();
  Cochain out(f.basis_ptr(), p + 1);
  const auto& tuples = f.basis().tuples(p + 1);
  Tuple face(p + 1);
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    const Tuple& t = tuples[k];
    double acc = 0.0;
    for (std::size_t i = 0; i <= p + 1; ++i) {
      for (std::size_t a = 0, b = 0; a <= p + 1; ++a) {
        if (a != i) face[b++] = t[a];
      }
      double v = f.values()[*f.basis().index(face)];
      acc += (i % 2 == 0) ? v : -v;
    }
    out.values()[k] = acc;
  }
  return out;
}

Cochain materialize(const ElementaryCochain<Vector>& f,
                    std::shared_ptr<const NeighborhoodBasis> basis) {
  return Cochain::from_function(std::move(basis), f.p(),
                                [&](const Tuple& t) { return eval_elementary(f, t); });
}

std::size_t rational_rank(std::size_t rows, std::size_t cols,
                          const std::vector<IntEntry>& entries) {
  if (rows == 0 || cols == 0) return 0;
  std::vector<std::vector<mpq_class>> m(rows, std::vector<mpq_class>(cols, 0));
  for (const auto& e : entries) m[e.row][e.col] += e.value;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      mpq_class factor = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) {
        if (m[rank][k] != 0) m[r][k] -= factor * m[rank][k];
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<std::size_t> kas_cohomology_dims(const FiniteMetricMeasureSpace& space,
                                             double eps, std::size_t p_max,
                                             std::size_t cap) {
  auto sp = std::make_shared<const FiniteMetricMeasureSpace>(space);
  NeighborhoodBasis basis(sp, eps, p_max + 1, cap);
  // rank of delta_p : C^p -> C^{p+1}
  std::vector<std::size_t> ranks(p_max + 1, 0);
  for (std::size_t p = 0; p <= p_max; ++p) {
    const auto& up = basis.tuples(p + 1);
    std::vector<IntEntry> entries;
    Tuple face(p + 1);
    for (std::size_t r = 0; r < up.size(); ++r) {
      for (std::size_t i = 0; i <= p + 1; ++i) {
        for (std::size_t a = 0, b = 0; a <= p + 1; ++a) {
          if (a != i) face[b++] = up[r][a];
        }
        entries.push_back(IntEntry{r, *basis.index(face), (i % 2 == 0) ? 1L : -1L});
      }
    }
    ranks[p] = rational_rank(up.size(), basis.count(p), entries);
  }
  std::vector<std::size_t> dims(p_max + 1);
  for (std::size_t p = 0; p <= p_max; ++p) {
    std::size_t below = p == 0 ? 0 : ranks[p - 1];
    dims[p] = basis.count(p) - ranks[p] - below;
  }
  return dims;
}

}  // namespace dcx::kas
