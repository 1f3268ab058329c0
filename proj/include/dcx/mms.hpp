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
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcx/kas.hpp"

namespace dcx::mms {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using kas::FiniteMetricMeasureSpace;
using kas::Tuple;

inline constexpr double kSymmetryTol = 1e-10;

/// Point masses j[x][y] of j_theta(x, {y}) on a finite space. Zero
/// diagonal, mu-symmetric.
class Kernel {
 public:
  /// Entries in [-clamp, 0) are treated as round-off and set to zero.
  Kernel(std::shared_ptr<const FiniteMetricMeasureSpace> space, RowMatrix j,
         std::string label, double clamp = 0.0);

  std::size_t size() const { return static_cast<std::size_t>(j_.rows()); }
  const FiniteMetricMeasureSpace& space() const { return *space_; }
  std::shared_ptr<const FiniteMetricMeasureSpace> space_ptr() const { return space_; }
  const RowMatrix& j() const { return j_; }
  double j(std::size_t x, std::size_t y) const {
    return j_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const std::string& label() const { return label_; }

  /// max |j_xy mu_x - j_yx mu_y| / max |j_xy mu_x|
  double symmetry_residual() const;
  /// Largest distance carrying positive mass.
  double support_radius() const { return support_; }
  /// (K u)(x) = sum_y j[x][y] u(y)
  Vector apply(const Vector& u) const;
  /// Same kernel with mass only on dist < eps.
  Kernel truncated(double eps) const;

 private:
  std::shared_ptr<const FiniteMetricMeasureSpace> space_;
  RowMatrix j_;
  std::string label_;
  double support_ = 0.0;
};

using KernelList = std::vector<const Kernel*>;

Vector gamma_theta(const Vector& f, const Kernel& k);
Vector gamma_theta_bilinear(const Vector& f, const Vector& h, const Kernel& k);
Vector gamma_theta_eps(const Vector& f, const Kernel& k, double eps);
double energy_theta(const Vector& f, const Kernel& k);
double energy_theta_bilinear(const Vector& f, const Vector& h, const Kernel& k);
double tail_energy(const Vector& f, const Kernel& k, double eps);

/// 1/p!: the nonlocal pairing of two elementary p-cochains converges to
/// this multiple of the local Gram-determinant pairing.
double localization_scale(std::size_t p);

enum class Method { automatic, brute_force, factorized };

/// Sum over x_1..x_p (distinct, all pairwise and to x0 below eps) of
/// F(x0, x) H(x0, x) prod_i j_i[x0][x_i].
double nonlocal_inner_at(std::size_t x0, const kas::ElementaryCochain<Vector>& f,
                         const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                         double eps, Method method = Method::automatic);
double nonlocal_inner_at(std::size_t x0, const kas::Cochain& f, const kas::Cochain& h,
                         const KernelList& kernels, double eps);

/// J_{p,theta}-integral of F H over N_p minus the diagonal.
double nonlocal_inner_total(const kas::ElementaryCochain<Vector>& f,
                            const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                            double eps, Method method = Method::automatic);
double nonlocal_inner_total(const kas::Cochain& f, const kas::Cochain& h,
                            const KernelList& kernels, double eps);

/// nonlocal_inner_total of the coboundaries; p+1 kernels.
double hodge_form(const kas::ElementaryCochain<Vector>& f,
                  const kas::ElementaryCochain<Vector>& h, const KernelList& kernels,
                  double eps, Method method = Method::automatic);
double hodge_form(const kas::Cochain& f, const kas::Cochain& h, const KernelList& kernels,
                  double eps);

/// True when every support constraint of the p-slot sum is implied by the
/// kernel supports, so the sum factorizes over slots.
bool constraints_vacuous(const std::vector<double>& support_radii, double eps,
                         double diameter);

namespace detail {

/// sum over sigma, tau in S_p of sgn(sigma) sgn(tau) prod_j m(j, sigma(j), tau(j))
template <class V, class Access>
V signed_permutation_sum(std::size_t p, Access&& m, const V& zero) {
  const auto& perms = kas::detail::permutations(p);
  V total = zero;
  for (const auto& s : perms) {
    for (const auto& t : perms) {
      V prod = m(0, s.perm[0], t.perm[0]);
      for (std::size_t j = 1; j < p; ++j) prod = prod * m(j, s.perm[j], t.perm[j]);
      if (s.sign * t.sign > 0) {
        total = total + prod;
      } else {
        total = total - prod;
      }
    }
  }
  return total;
}

/// Weight attached to slot j (1-based) for the mean-index pair (a, b):
/// 0 -> 1, 1 -> g, 2 -> k, 3 -> g k.
inline int weight_code(std::size_t a, std::size_t b, std::size_t slot) {
  return (a == slot ? 1 : 0) + (b == slot ? 2 : 0);
}

}  // namespace detail

}  // namespace dcx::mms
