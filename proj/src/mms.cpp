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

#include "dcx/mms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "dcx/parallel.hpp"
#include "dcx/simd.hpp"

namespace dcx::mms {
namespace {

using Index = Eigen::Index;

void check_size(const Vector& f, const Kernel& k) {
  if (static_cast<std::size_t>(f.size()) != k.size()) {
    throw DimensionError("function has " + std::to_string(f.size()) + " values, kernel has " +
                         std::to_string(k.size()) + " points");
  }
}

void check_kernels(std::size_t p, const KernelList& kernels, std::size_t n) {
  if (kernels.size() != p) {
    throw DimensionError("expected " + std::to_string(p) + " kernels, got " +
                         std::to_string(kernels.size()));
  }
  for (const Kernel* k : kernels) {
    if (k == nullptr) throw DimensionError("null kernel");
    if (k->size() != n) throw DimensionError("kernel defined on a different space size");
  }
}

double factorial(std::size_t p) {
  double f = 1.0;
  for (std::size_t i = 2; i <= p; ++i) f *= static_cast<double>(i);
  return f;
}

// Brute-force p-slot sum with explicit support constraints.
double brute_force_at(std::size_t x0, std::size_t p, const KernelList& kernels, double eps,
                      const FiniteMetricMeasureSpace& space,
                      const std::function<double(const Tuple&)>& fh) {
  const std::size_t n = space.size();
  std::vector<std::vector<std::size_t>> cand(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t y = 0; y < n; ++y) {
      if (y != x0 && kernels[i]->j(x0, y) > 0.0 && space.dist(x0, y) < eps) cand[i].push_back(y);
    }
  }
  Tuple t(p + 1);
  t[0] = x0;
  double total = 0.0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t slot, double w) {
    if (slot == p) {
      total += fh(t) * w;
      return;
    }
    for (std::size_t y : cand[slot]) {
      bool ok = true;
      for (std::size_t l = 1; l <= slot && ok; ++l) {
        ok = t[l] != y && space.dist(t[l], y) < eps;
      }
      if (!ok) continue;
      t[slot + 1] = y;
      rec(slot + 1, w * kernels[slot]->j(x0, y));
    }
  };
  rec(0, 1.0);
  return total;
}

// Factorized evaluation for elementary cochains: the p-slot sum splits
// into per-slot weighted moments once the constraints are vacuous.
class Factorized {
 public:
  Factorized(const kas::ElementaryCochain<Vector>& f, const kas::ElementaryCochain<Vector>& h,
             KernelList kernels)
      : f_(f), h_(h), kernels_(std::move(kernels)), p_(f.p()) {
    const Index n = static_cast<Index>(kernels_.front()->size());
    ones_ = Vector::Ones(n);
    for (const auto& tf : f_.terms()) {
      for (const auto& th : h_.terms()) gk_.push_back(tf.g.cwiseProduct(th.g));
    }
    scale_ = 1.0 / (factorial(p_) * factorial(p_) * double(p_ + 1) * double(p_ + 1));
  }

  double at(std::size_t x0) const {
    const auto& kt = simd::kernels();
    const std::size_t p = p_;
    const std::size_t n = kernels_.front()->size();
    const Index xi = static_cast<Index>(x0);
    // moments[slot][code][alpha * p + beta]
    std::vector<std::vector<std::vector<double>>> m(
        p, std::vector<std::vector<double>>(4, std::vector<double>(p * p)));
    double value = 0.0;
    std::size_t pair = 0;
    for (const auto& tf : f_.terms()) {
      for (const auto& th : h_.terms()) {
        const Vector* w[4] = {&ones_, &tf.g, &th.g, &gk_[pair]};
        ++pair;
        for (std::size_t s = 0; s < p; ++s) {
          const double* row = kernels_[s]->j().row(xi).data();
          for (int c = 0; c < 4; ++c) {
            for (std::size_t a = 0; a < p; ++a) {
              const Vector& fa = tf.fs[a];
              for (std::size_t b = 0; b < p; ++b) {
                const Vector& hb = th.fs[b];
                m[s][static_cast<std::size_t>(c)][a * p + b] = kt.moment_row(
                    row, fa.data(), hb.data(), w[c]->data(), fa[xi], hb[xi], n);
              }
            }
          }
        }
        double acc = 0.0;
        for (std::size_t a = 0; a <= p; ++a) {
          for (std::size_t b = 0; b <= p; ++b) {
            double base = (a == 0 ? tf.g[xi] : 1.0) * (b == 0 ? th.g[xi] : 1.0);
            double s = detail::signed_permutation_sum<double>(
                p,
                [&](std::size_t slot, std::size_t al, std::size_t be) {
                  return m[slot][static_cast<std::size_t>(detail::weight_code(a, b, slot + 1))]
                          [al * p + be];
                },
                0.0);
            acc += base * s;
          }
        }
        value += tf.coeff * th.coeff * acc;
      }
    }
    return value * scale_;
  }

 private:
  const kas::ElementaryCochain<Vector>& f_;
  const kas::ElementaryCochain<Vector>& h_;
  KernelList kernels_;
  std::size_t p_;
  Vector ones_;
  std::vector<Vector> gk_;
  double scale_ = 1.0;
};

std::vector<double> radii(const KernelList& kernels) {
  std::vector<double> r;
  for (const Kernel* k : kernels) r.push_back(k->support_radius());
  return r;
}

// Chooses the evaluation route; for p = 1 the single constraint is folded
// into a truncated kernel.
struct Plan {
  bool factorized = false;
  std::vector<Kernel> truncated;
  KernelList kernels;
};

Plan make_plan(std::size_t p, const KernelList& kernels, double eps, Method method,
               const FiniteMetricMeasureSpace& space) {
  Plan plan;
  plan.kernels = kernels;
  bool vacuous = constraints_vacuous(radii(kernels), eps, space.diameter());
  if (method == Method::brute_force) return plan;
  if (vacuous) {
    plan.factorized = true;
    return plan;
  }
  if (p == 1) {
    plan.truncated.push_back(kernels[0]->truncated(eps));
    plan.kernels = {&plan.truncated[0]};
    plan.factorized = true;
    return plan;
  }
  if (method == Method::factorized) {
    throw UnsupportedInput("factorized evaluation needs kernel supports inside eps");
  }
  return plan;
}

}  // namespace

Kernel::Kernel(std::shared_ptr<const FiniteMetricMeasureSpace> space, RowMatrix j,
               std::string label, double clamp)
    : space_(std::move(space)), j_(std::move(j)), label_(std::move(label)) {
  const Index n = static_cast<Index>(space_->size());
  if (j_.rows() != n || j_.cols() != n) throw DimensionError("kernel matrix must be n x n");
  for (Index x = 0; x < n; ++x) {
    if (j_(x, x) != 0.0) throw DomainError("kernel diagonal must vanish");
    for (Index y = 0; y < n; ++y) {
      double v = j_(x, y);
      if (v < 0.0) {
        if (v >= -clamp) {
          j_(x, y) = 0.0;
        } else {
          throw DomainError("kernel masses must be nonnegative (" + label_ + ")");
        }
      } else if (v > 0.0) {
        support_ = std::max(support_, space_->dist(static_cast<std::size_t>(x),
                                                   static_cast<std::size_t>(y)));
      }
    }
  }
  double res = symmetry_residual();
  if (res > kSymmetryTol) {
    throw DomainError("kernel is not mu-symmetric (" + label_ + ", residual " +
                      std::to_string(res) + ")");
  }
}

double Kernel::symmetry_residual() const {
  const Index n = j_.rows();
  const Vector& mu = space_->mu();
  double worst = 0.0;
  double scale = 0.0;
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      double a = j_(x, y) * mu[x];
      scale = std::max(scale, std::abs(a));
      worst = std::max(worst, std::abs(a - j_(y, x) * mu[y]));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

Vector Kernel::apply(const Vector& u) const {
  check_size(u, *this);
  const auto& kt = simd::kernels();
  Vector out(u.size());
  for (Index x = 0; x < j_.rows(); ++x) out[x] = kt.dot(j_.row(x).data(), u.data(), size());
  return out;
}

Kernel Kernel::truncated(double eps) const {
  RowMatrix t = j_;
  for (Index x = 0; x < t.rows(); ++x) {
    for (Index y = 0; y < t.cols(); ++y) {
      if (!(space_->dist(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) < eps)) {
        t(x, y) = 0.0;
      }
    }
  }
  return Kernel(space_, std::move(t), label_ + " eps<" + std::to_string(eps));
}

Vector gamma_theta_bilinear(const Vector& f, const Vector& h, const Kernel& k) {
  check_size(f, k);
  check_size(h, k);
  const auto& kt = simd::kernels();
  const std::size_t n = k.size();
  Vector out(f.size());
  for (Index x = 0; x < f.size(); ++x) {
    out[x] = kt.gamma_row(k.j().row(x).data(), f.data(), h.data(), f[x], h[x], n);
  }
  return out;
}

Vector gamma_theta(const Vector& f, const Kernel& k) { return gamma_theta_bilinear(f, f, k); }

Vector gamma_theta_eps(const Vector& f, const Kernel& k, double eps) {
  check_size(f, k);
  const auto& kt = simd::kernels();
  const std::size_t n = k.size();
  const auto& dist = k.space().dist();
  Vector out(f.size());
  for (Index x = 0; x < f.size(); ++x) {
    // dist is symmetric, so column x is row x
    out[x] = kt.gamma_row_masked(k.j().row(x).data(), f.data(), f.data(), f[x], f[x],
                                 dist.col(x).data(), eps, n);
  }
  return out;
}

double energy_theta_bilinear(const Vector& f, const Vector& h, const Kernel& k) {
  Vector g = gamma_theta_bilinear(f, h, k).cwiseProduct(k.space().mu());
  return tree_sum(g.data(), static_cast<std::size_t>(g.size()));
}

double energy_theta(const Vector& f, const Kernel& k) { return energy_theta_bilinear(f, f, k); }

double tail_energy(const Vector& f, const Kernel& k, double eps) {
  Vector full = gamma_theta(f, k);
  Vector near = gamma_theta_eps(f, k, eps);
  Vector g = (full - near).cwiseProduct(k.space().mu());
  return tree_sum(g.data(), static_cast<std::size_t>(g.size()));
}

double localization_scale(std::size_t p) { return 1.0 / factorial(p); }

bool constraints_vacuous(const std::vector<double>& r, double eps, double diameter) {
  if (diameter < eps) return true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] < eps)) return false;
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      if (!(r[i] + r[j] < eps)) return false;
    }
  }
  return true;
}

double nonlocal_inner_at(std::size_t x0, const kas::ElementaryCochain<Vector>& f,
                         const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                         double eps, Method method) {
  if (f.p() != h.p()) throw DimensionError("nonlocal pairing needs equal degrees");
  if (f.p() == 0) throw DimensionError("nonlocal pairing needs degree >= 1");
  const std::size_t p = f.p();
  if (kernels.empty()) check_kernels(p, kernels, 0);
  const auto& space = kernels.front()->space();
  check_kernels(p, kernels, space.size());
  if (x0 >= space.size()) throw DimensionError("base point out of range");
  Plan plan = make_plan(p, kernels, eps, method, space);
  if (plan.factorized) return Factorized(f, h, plan.kernels).at(x0);
  return brute_force_at(x0, p, kernels, eps, space, [&](const Tuple& t) {
    return kas::eval_elementary(f, t) * kas::eval_elementary(h, t);
  });
}

double nonlocal_inner_at(std::size_t x0, const kas::Cochain& f, const kas::Cochain& h,
                         const KernelList& kernels, double eps) {
  if (f.p() != h.p()) throw DimensionError("nonlocal pairing needs equal degrees");
  if (f.p() == 0) throw DimensionError("nonlocal pairing needs degree >= 1");
  if (eps > f.eps() || eps > h.eps()) {
    throw DomainError("pairing scale exceeds the cochain neighborhood scale");
  }
  const auto& space = f.basis().space();
  check_kernels(f.p(), kernels, space.size());
  return brute_force_at(x0, f.p(), kernels, eps, space,
                        [&](const Tuple& t) { return f.value(t) * h.value(t); });
}

double nonlocal_inner_total(const kas::ElementaryCochain<Vector>& f,
                            const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                            double eps, Method method) {
  if (f.p() != h.p()) throw DimensionError("nonlocal pairing needs equal degrees");
  if (f.p() == 0) throw DimensionError("nonlocal pairing needs degree >= 1");
  const std::size_t p = f.p();
  if (kernels.empty()) check_kernels(p, kernels, 0);
  const auto& space = kernels.front()->space();
  check_kernels(p, kernels, space.size());
  const std::size_t n = space.size();
  Plan plan = make_plan(p, kernels, eps, method, space);
  std::vector<double> slots(n);
  if (plan.factorized) {
    Factorized fz(f, h, plan.kernels);
    parallel_for(n, [&](std::size_t x) { slots[x] = space.mu()[static_cast<Index>(x)] * fz.at(x); });
  } else {
    parallel_for(n, [&](std::size_t x) {
      slots[x] = space.mu()[static_cast<Index>(x)] *
                 brute_force_at(x, p, kernels, eps, space, [&](const Tuple& t) {
                   return kas::eval_elementary(f, t) * kas::eval_elementary(h, t);
                 });
    });
  }
  return tree_sum(slots);
}

double nonlocal_inner_total(const kas::Cochain& f, const kas::Cochain& h,
                            const KernelList& kernels, double eps) {
  const auto& space = f.basis().space();
  const std::size_t n = space.size();
  std::vector<double> slots(n);
  // validates degrees and scale
  if (n > 0) (void)nonlocal_inner_at(0, f, h, kernels, eps);
  parallel_for(n, [&](std::size_t x) {
    slots[x] = space.mu()[static_cast<Index>(x)] * nonlocal_inner_at(x, f, h, kernels, eps);
  });
  return tree_sum(slots);
}

double hodge_form(const kas::ElementaryCochain<Vector>& f,
                  const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                  double eps, Method method) {
  if (kernels.empty()) throw DimensionError("hodge_form needs p+1 kernels");
  Vector one = Vector::Ones(static_cast<Index>(kernels.front()->size()));
  return nonlocal_inner_total(kas::coboundary_representation(f, one),
                              kas::coboundary_representation(h, one), kernels, eps, method);
}

double hodge_form(const kas::Cochain& f, const kas::Cochain& h, const KernelList& kernels,
                  double eps) {
  return nonlocal_inner_total(kas::coboundary(f, eps), kas::coboundary(h, eps), kernels, eps);
}

}  // namespace dcx::mms
