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

#include "dcx/spaces/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "dcx/error.hpp"

namespace dcx::spaces {
namespace {

using Index = Eigen::Index;
constexpr double kTwoPi = 2.0 * M_PI;

Freq add(Freq a, Freq b) { return {a[0] + b[0], a[1] + b[1]}; }

void accumulate(std::map<Freq, Complex>& m, Freq k, Complex v) {
  auto [it, inserted] = m.emplace(k, v);
  if (!inserted) {
    it->second += v;
    if (it->second == Complex(0.0, 0.0)) m.erase(it);
  }
}

// cos(2 pi q / res) with the integer argument reduced first
double cos_frac(long q, int res) {
  long r = q % res;
  if (r < 0) r += res;
  return std::cos(kTwoPi * static_cast<double>(r) / res);
}

}  // namespace

// ---------------------------------------------------------------------------
// TrigPoly

TrigPoly TrigPoly::constant(double c) {
  TrigPoly p;
  if (c != 0.0) p.c_[{0, 0}] = c;
  return p;
}

TrigPoly TrigPoly::mode(Freq k, Complex c) {
  TrigPoly p;
  if (c != Complex(0.0, 0.0)) p.c_[k] = c;
  return p;
}

TrigPoly TrigPoly::cos_mode(Freq k, double amp) {
  if (k[0] == 0 && k[1] == 0) return constant(amp);
  TrigPoly p;
  p.c_[k] = 0.5 * amp;
  p.c_[{-k[0], -k[1]}] = 0.5 * amp;
  return p;
}

TrigPoly TrigPoly::sin_mode(Freq k, double amp) {
  TrigPoly p;
  if (k[0] == 0 && k[1] == 0) return p;
  p.c_[k] = Complex(0.0, -0.5 * amp);
  p.c_[{-k[0], -k[1]}] = Complex(0.0, 0.5 * amp);
  return p;
}

Complex TrigPoly::coeff(Freq k) const {
  auto it = c_.find(k);
  return it == c_.end() ? Complex(0.0, 0.0) : it->second;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
  for (const auto& [k, v] : o.c_) accumulate(c_, k, v);
  return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
  for (const auto& [k, v] : o.c_) accumulate(c_, k, -v);
  return *this;
}

TrigPoly& TrigPoly::operator*=(double s) {
  if (s == 0.0) {
    c_.clear();
    return *this;
  }
  for (auto& kv : c_) kv.second *= s;
  return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
  TrigPoly out;
  for (const auto& [k, u] : a.c_) {
    for (const auto& [l, v] : b.c_) accumulate(out.c_, add(k, l), u * v);
  }
  return out;
}

TrigPoly TrigPoly::derivative(int axis) const {
  TrigPoly out;
  for (const auto& [k, v] : c_) {
    int ki = k[static_cast<std::size_t>(axis)];
    if (ki != 0) out.c_[k] = v * Complex(0.0, kTwoPi * ki);
  }
  return out;
}

TrigPoly TrigPoly::conj() const {
  TrigPoly out;
  for (const auto& [k, v] : c_) out.c_[{-k[0], -k[1]}] = std::conj(v);
  return out;
}

double TrigPoly::evaluate(double x1, double x2) const {
  double acc = 0.0;
  for (const auto& [k, v] : c_) {
    double phase = kTwoPi * (k[0] * x1 + k[1] * x2);
    acc += v.real() * std::cos(phase) - v.imag() * std::sin(phase);
  }
  return acc;
}

double TrigPoly::mean() const { return coeff({0, 0}).real(); }

double TrigPoly::grid_mean(int res) const {
  double acc = 0.0;
  for (const auto& [k, v] : c_) {
    if (k[0] % res == 0 && k[1] % res == 0) acc += v.real();
  }
  return acc;
}

bool TrigPoly::is_constant() const {
  for (const auto& [k, v] : c_) {
    if ((k[0] != 0 || k[1] != 0) && v != Complex(0.0, 0.0)) return false;
  }
  return true;
}

int TrigPoly::max_abs_freq() const {
  int m = 0;
  for (const auto& kv : c_) m = std::max({m, std::abs(kv.first[0]), std::abs(kv.first[1])});
  return m;
}

// ---------------------------------------------------------------------------
// TorusGrid

TorusGrid::TorusGrid(int n, int res) : n_(n), res_(res) {
  if (n != 1 && n != 2) throw DomainError("torus dimension must be 1 or 2");
  if (res < 3) throw DomainError("torus resolution must be at least 3");
}

std::size_t TorusGrid::size() const {
  return n_ == 1 ? static_cast<std::size_t>(res_)
                 : static_cast<std::size_t>(res_) * static_cast<std::size_t>(res_);
}

std::array<int, 2> TorusGrid::lattice(std::size_t i) const {
  if (n_ == 1) return {static_cast<int>(i), 0};
  return {static_cast<int>(i / static_cast<std::size_t>(res_)),
          static_cast<int>(i % static_cast<std::size_t>(res_))};
}

std::array<double, 2> TorusGrid::point(std::size_t i) const {
  auto l = lattice(i);
  return {l[0] * spacing(), l[1] * spacing()};
}

std::array<int, 2> TorusGrid::offset(std::size_t a, std::size_t b) const {
  auto la = lattice(a);
  auto lb = lattice(b);
  std::array<int, 2> d{};
  for (int i = 0; i < 2; ++i) {
    int v = ((lb[static_cast<std::size_t>(i)] - la[static_cast<std::size_t>(i)]) % res_ + res_) %
            res_;
    if (2 * v > res_) v -= res_;
    d[static_cast<std::size_t>(i)] = v;
  }
  return d;
}

double TorusGrid::periodic_distance(std::size_t a, std::size_t b) const {
  auto d = offset(a, b);
  return std::sqrt(double(d[0]) * d[0] + double(d[1]) * d[1]) * spacing();
}

double TorusGrid::diameter() const { return 0.5 * std::sqrt(static_cast<double>(n_)); }

Vector TorusGrid::sample(const TrigPoly& f) const {
  const std::size_t n = size();
  Vector out(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto l = lattice(i);
    double acc = 0.0;
    for (const auto& [k, v] : f.coeffs()) {
      long q = static_cast<long>(k[0]) * l[0] + static_cast<long>(k[1]) * l[1];
      long r = ((q % res_) + res_) % res_;
      double ph = kTwoPi * static_cast<double>(r) / res_;
      acc += v.real() * std::cos(ph) - v.imag() * std::sin(ph);
    }
    out[static_cast<Index>(i)] = acc;
  }
  return out;
}

FiniteDirichletSpace TorusGrid::to_finite() const {
  const std::size_t n = size();
  if (n > 2500) throw ResourceError("dense torus backend too large", n, 2500);
  Matrix d = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  Matrix c = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  const double mu = 1.0 / static_cast<double>(n);
  const double cond = mu * res_ * res_;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      d(static_cast<Index>(a), static_cast<Index>(b)) = periodic_distance(a, b);
      auto o = offset(a, b);
      if (std::abs(o[0]) + std::abs(o[1]) == 1) {
        c(static_cast<Index>(a), static_cast<Index>(b)) = cond;
      }
    }
  }
  auto space = std::make_shared<const kas::FiniteMetricMeasureSpace>(
      d, Vector::Constant(static_cast<Index>(n), mu), std::nullopt, false);
  std::ostringstream name;
  name << "torus{" << n_ << "," << res_ << "}";
  return FiniteDirichletSpace{space, graph_stiffness(c), name.str()};
}

TrigPoly carre(const TrigPoly& f, const TrigPoly& g, int n) {
  TrigPoly out;
  for (int i = 0; i < n; ++i) out += f.derivative(i) * g.derivative(i);
  return out;
}

double dirichlet_energy(const TrigPoly& f, int n) { return carre(f, f, n).mean(); }

double grid_dirichlet_energy(const TrigPoly& f, const TorusGrid& grid) {
  const int res = grid.res();
  double e = 0.0;
  for (int i = 0; i < grid.dim(); ++i) {
    TrigPoly d;
    for (const auto& [k, v] : f.coeffs()) {
      int ki = k[static_cast<std::size_t>(i)];
      double ph = kTwoPi * ki / res;
      Complex shift(std::cos(ph) - 1.0, std::sin(ph));
      d += TrigPoly::mode(k, v * shift * static_cast<double>(res));
    }
    e += (d * d).grid_mean(res);
  }
  return e;
}

// ---------------------------------------------------------------------------
// TorusKernel

struct TorusKernel::Impl {
  Kind kind;
  TorusGrid grid;
  double param;
  std::string label;
  double support = std::numeric_limits<double>::infinity();
  double point_mass = 0.0;
  // ball: radius in lattice units and whether it is an integer
  double radius_units = 0.0;
  long radius_int = -1;
  // row half-widths L(m1) for |m1| <= rows.size() - 1 (n = 2), or L0 (n = 1)
  std::vector<long> rows;
  mutable std::mutex mutex;
  mutable std::map<Freq, double> cache;

  Impl(Kind k, TorusGrid g, double p) : kind(k), grid(g), param(p) {}

  bool inside(long q) const {
    if (radius_int >= 0) return q < radius_int * radius_int;
    return static_cast<double>(q) < radius_units * radius_units;
  }

  void build_ball(double r, double c_continuum, BallNorm norm) {
    const int res = grid.res();
    radius_units = r * res;
    double nearest = std::round(radius_units);
    if (std::abs(radius_units - nearest) < 1e-9) radius_int = static_cast<long>(nearest);
    long lim = static_cast<long>(std::ceil(radius_units)) + 1;
    double second = 0.0;  // sum |m|^2 over the lattice ball
    long maxq = 0;
    rows.clear();
    if (grid.dim() == 1) {
      long l = 0;
      while (l + 1 <= lim && inside((l + 1) * (l + 1))) ++l;
      rows.push_back(l);
      for (long m = 1; m <= l; ++m) second += 2.0 * double(m) * double(m);
      maxq = l * l;
    } else {
      for (long m1 = 0; m1 <= lim; ++m1) {
        if (!inside(m1 * m1)) break;
        long l = 0;
        while (l + 1 <= lim && inside(m1 * m1 + (l + 1) * (l + 1))) ++l;
        rows.push_back(l);
        double mult = m1 == 0 ? 1.0 : 2.0;
        for (long m2 = -l; m2 <= l; ++m2) {
          second += mult * double(m1 * m1 + m2 * m2);
          maxq = std::max(maxq, m1 * m1 + m2 * m2);
        }
      }
    }
    if (!(second > 0.0)) throw DomainError("ball radius below the grid spacing");
    const double h = grid.spacing();
    const int n = grid.dim();
    double hn = std::pow(h, n);
    double c = norm == BallNorm::continuum ? c_continuum : n / (std::pow(h, n + 2) * second);
    point_mass = c * hn;
    support = std::sqrt(static_cast<double>(maxq)) * h;
  }

  double laplace(Freq k) const {
    const int res = grid.res();
    double l = 0.0;
    for (int i = 0; i < grid.dim(); ++i) {
      double s = std::sin(M_PI * static_cast<double>(k[static_cast<std::size_t>(i)] % res) / res);
      l += 4.0 * res * res * s * s;
    }
    return l;
  }

  double compute(Freq k) const {
    const int res = grid.res();
    switch (kind) {
      case Kind::heat: {
        double t = param;
        return -std::expm1(-t * laplace(k)) / (2.0 * t);
      }
      case Kind::levy: {
        double l = laplace(k);
        return l > 0.0 ? 0.5 * std::pow(l, param) : 0.0;
      }
      case Kind::ball:
      default:
        break;
    }
    if (grid.dim() == 1) {
      long l = rows[0];
      double s = 0.0;
      for (long m = 1; m <= l; ++m) s += 2.0 * (1.0 - cos_frac(long(k[0]) * m, res));
      return point_mass * s;
    }
    long lmax = 0;
    for (long l : rows) lmax = std::max(lmax, l);
    // prefix sums of 1 - cos over m2
    std::vector<double> pc(static_cast<std::size_t>(lmax) + 1, 0.0);
    std::vector<double> cs(static_cast<std::size_t>(lmax) + 1, 1.0);
    for (long m = 1; m <= lmax; ++m) {
      cs[static_cast<std::size_t>(m)] =
          cs[static_cast<std::size_t>(m - 1)] + 2.0 * cos_frac(long(k[1]) * m, res);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      long m1 = static_cast<long>(i);
      long l = rows[i];
      double width = 2.0 * l + 1.0;
      double c1 = cos_frac(long(k[0]) * m1, res);
      // sum over |m2| <= l of 1 - cos(a + b m2) = width - cos(a) sum cos(b m2)
      double row = width - c1 * cs[static_cast<std::size_t>(l)];
      s += (m1 == 0 ? 1.0 : 2.0) * row;
    }
    return point_mass * s;
  }
};

TorusKernel TorusKernel::ball(const TorusGrid& grid, double r, BallNorm norm) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (r > 0.5) throw DomainError("ball radius exceeds half the torus width");
  auto impl = std::make_shared<Impl>(Kind::ball, grid, r);
  int n = grid.dim();
  impl->build_ball(r, (n + 2) / (unit_ball_volume(n) * std::pow(r, n + 2)), norm);
  std::ostringstream label;
  label << "ball r=" << r;
  impl->label = label.str();
  return TorusKernel(impl);
}

TorusKernel TorusKernel::heat(const TorusGrid& grid, double t) {
  if (!(t > 0.0)) throw DomainError("heat time must be positive");
  auto impl = std::make_shared<Impl>(Kind::heat, grid, t);
  std::ostringstream label;
  label << "heat t=" << t;
  impl->label = label.str();
  return TorusKernel(impl);
}

TorusKernel TorusKernel::levy(const TorusGrid& grid, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("levy alpha must lie in (0, 1)");
  auto impl = std::make_shared<Impl>(Kind::levy, grid, alpha);
  std::ostringstream label;
  label << "levy a=" << alpha;
  impl->label = label.str();
  return TorusKernel(impl);
}

TorusKernel::Kind TorusKernel::kind() const { return impl_->kind; }
const TorusGrid& TorusKernel::grid() const { return impl_->grid; }
const std::string& TorusKernel::label() const { return impl_->label; }
double TorusKernel::parameter() const { return impl_->param; }
double TorusKernel::support_radius() const { return impl_->support; }
double TorusKernel::point_mass() const { return impl_->point_mass; }

double TorusKernel::symbol(Freq k) const {
  std::lock_guard<std::mutex> lock(impl_->mutex);
  auto it = impl_->cache.find(k);
  if (it != impl_->cache.end()) return it->second;
  double v = impl_->compute(k);
  impl_->cache.emplace(k, v);
  return v;
}

TorusKernel TorusKernel::truncated(double eps) const {
  if (impl_->kind != Kind::ball) {
    throw UnsupportedInput("spectral truncation is only available for ball kernels");
  }
  if (impl_->support < eps) return *this;
  auto impl = std::make_shared<Impl>(Kind::ball, impl_->grid, std::min(impl_->param, eps));
  const double h = impl_->grid.spacing();
  const int n = impl_->grid.dim();
  double mass = impl_->point_mass;
  // same per-point mass, smaller ball
  impl->build_ball(std::min(impl_->param, eps), mass / std::pow(h, n), BallNorm::continuum);
  impl->point_mass = mass;
  std::ostringstream label;
  label << impl_->label << " eps<" << eps;
  impl->label = label.str();
  return TorusKernel(impl);
}

TrigPoly TorusKernel::moment(const TrigPoly& f, const TrigPoly& h, const TrigPoly& w) const {
  std::map<Freq, Complex> out;
  for (const auto& [m, c] : w.coeffs()) {
    double pm = symbol(m);
    for (const auto& [k, a] : f.coeffs()) {
      Freq km = add(k, m);
      double pkm = symbol(km);
      for (const auto& [l, b] : h.coeffs()) {
        Freq lm = add(l, m);
        Freq klm = add(k, lm);
        double s = -symbol(klm) + pkm + symbol(lm) - pm;
        if (s == 0.0) continue;
        accumulate(out, klm, a * b * c * s);
      }
    }
  }
  TrigPoly r;
  for (const auto& [k, v] : out) r += TrigPoly::mode(k, v);
  return r;
}

TrigPoly TorusKernel::gamma(const TrigPoly& f, const TrigPoly& h) const {
  return moment(f, h, TrigPoly::constant(1.0));
}

double TorusKernel::energy(const TrigPoly& f) const {
  return gamma(f, f).grid_mean(impl_->grid.res());
}

double TorusKernel::tail_energy(const TrigPoly& f, double eps) const {
  if (impl_->kind == Kind::ball && impl_->support < eps) return 0.0;
  return energy(f) - truncated(eps).energy(f);
}

Kernel TorusKernel::dense(const FiniteDirichletSpace& finite) const {
  const TorusGrid& g = impl_->grid;
  const std::size_t n = g.size();
  if (finite.size() != n) throw DimensionError("dense backend does not match the torus grid");
  if (impl_->kind == Kind::heat) return heat_kernel(finite, impl_->param);
  if (impl_->kind == Kind::levy) return levy_kernel(finite, impl_->param);
  mms::RowMatrix j = mms::RowMatrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      auto o = g.offset(a, b);
      long q = long(o[0]) * o[0] + long(o[1]) * o[1];
      if (impl_->inside(q)) j(static_cast<Index>(a), static_cast<Index>(b)) = impl_->point_mass;
    }
  }
  return Kernel(finite.space, std::move(j), impl_->label);
}

// ---------------------------------------------------------------------------
// Nonlocal pairings of trig cochains

namespace {

std::vector<TorusKernel> plan_kernels(std::size_t p, const TorusKernelList& kernels,
                                      double eps) {
  if (kernels.size() != p) {
    throw DimensionError("expected " + std::to_string(p) + " kernels, got " +
                         std::to_string(kernels.size()));
  }
  const TorusGrid& g = kernels.front()->grid();
  std::vector<double> r;
  for (const TorusKernel* k : kernels) {
    if (k->grid().res() != g.res() || k->grid().dim() != g.dim()) {
      throw DimensionError("kernels live on different torus grids");
    }
    r.push_back(k->support_radius());
  }
  std::vector<TorusKernel> out;
  for (const TorusKernel* k : kernels) out.push_back(*k);
  if (mms::constraints_vacuous(r, eps, g.diameter())) return out;
  if (p == 1 && out[0].kind() == TorusKernel::Kind::ball) {
    out[0] = out[0].truncated(eps);
    return out;
  }
  throw UnsupportedInput("torus pairing needs kernel supports inside eps; use a dense backend");
}

}  // namespace

TrigPoly nonlocal_density(const kas::ElementaryCochain<TrigPoly>& f,
                          const kas::ElementaryCochain<TrigPoly>& h,
                          const TorusKernelList& kernels, double eps) {
  if (f.p() != h.p()) throw DimensionError("nonlocal pairing needs equal degrees");
  if (f.p() == 0) throw DimensionError("nonlocal pairing needs degree >= 1");
  const std::size_t p = f.p();
  std::vector<TorusKernel> ks = plan_kernels(p, kernels, eps);
  double fact = 1.0;
  for (std::size_t i = 2; i <= p; ++i) fact *= static_cast<double>(i);
  const double scale = 1.0 / (fact * fact * double(p + 1) * double(p + 1));
  const TrigPoly one = TrigPoly::constant(1.0);
  TrigPoly density;
  for (const auto& tf : f.terms()) {
    for (const auto& th : h.terms()) {
      TrigPoly w[4] = {one, tf.g, th.g, tf.g * th.g};
      // m[slot][code][a * p + b]
      std::vector<std::vector<std::vector<TrigPoly>>> m(
          p, std::vector<std::vector<TrigPoly>>(4, std::vector<TrigPoly>(p * p)));
      for (std::size_t s = 0; s < p; ++s) {
        for (int c = 0; c < 4; ++c) {
          for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
              m[s][static_cast<std::size_t>(c)][a * p + b] =
                  ks[s].moment(tf.fs[a], th.fs[b], w[c]);
            }
          }
        }
      }
      TrigPoly acc;
      for (std::size_t a = 0; a <= p; ++a) {
        for (std::size_t b = 0; b <= p; ++b) {
          TrigPoly base = (a == 0 ? tf.g : one) * (b == 0 ? th.g : one);
          TrigPoly s = mms::detail::signed_permutation_sum<TrigPoly>(
              p,
              [&](std::size_t slot, std::size_t al, std::size_t be) -> const TrigPoly& {
                return m[slot][static_cast<std::size_t>(mms::detail::weight_code(a, b, slot + 1))]
                        [al * p + be];
              },
              TrigPoly());
          acc += base * s;
        }
      }
      density += acc * (tf.coeff * th.coeff);
    }
  }
  return density * scale;
}

double nonlocal_inner_at(std::size_t x0, const kas::ElementaryCochain<TrigPoly>& f,
                         const kas::ElementaryCochain<TrigPoly>& h,
                         const TorusKernelList& kernels, double eps) {
  TrigPoly d = nonlocal_density(f, h, kernels, eps);
  const TorusGrid& g = kernels.front()->grid();
  if (x0 >= g.size()) throw DimensionError("base point out of range");
  auto pt = g.point(x0);
  return d.evaluate(pt[0], pt[1]);
}

double nonlocal_inner_total(const kas::ElementaryCochain<TrigPoly>& f,
                            const kas::ElementaryCochain<TrigPoly>& h,
                            const TorusKernelList& kernels, double eps) {
  TrigPoly d = nonlocal_density(f, h, kernels, eps);
  return d.grid_mean(kernels.front()->grid().res());
}

double hodge_form(const kas::ElementaryCochain<TrigPoly>& f,
                  const kas::ElementaryCochain<TrigPoly>& h, const TorusKernelList& kernels,
                  double eps) {
  const TrigPoly one = TrigPoly::constant(1.0);
  return nonlocal_inner_total(kas::coboundary_representation(f, one),
                              kas::coboundary_representation(h, one), kernels, eps);
}

kas::ElementaryCochain<Vector> sample(const kas::ElementaryCochain<TrigPoly>& f,
                                      const TorusGrid& grid) {
  kas::ElementaryCochain<Vector> out(f.p());
  for (const auto& t : f.terms()) {
    std::vector<Vector> fs;
    for (const auto& fi : t.fs) fs.push_back(grid.sample(fi));
    out.add_term(grid.sample(t.g), std::move(fs), t.coeff);
  }
  return out;
}

TorusField::TorusField(int n, int quad_res)
    : grid_(n, quad_res), weight_(1.0 / static_cast<double>(grid_.size())) {}

}  // namespace dcx::spaces
