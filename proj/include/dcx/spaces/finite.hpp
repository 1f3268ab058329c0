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
#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "dcx/kas.hpp"
#include "dcx/mms.hpp"

namespace dcx::spaces {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using kas::FiniteMetricMeasureSpace;
using mms::Kernel;

/// Finite metric measure space with a Dirichlet form E(f) = f^T A f whose
/// reference measure is the space's mu.
struct FiniteDirichletSpace {
  std::shared_ptr<const FiniteMetricMeasureSpace> space;
  Matrix stiffness;
  std::string name;

  std::size_t size() const { return space->size(); }
  double energy(const Vector& f) const { return f.dot(stiffness * f); }
  double energy_bilinear(const Vector& f, const Vector& g) const {
    return f.dot(stiffness * g);
  }
};

/// Stiffness of a weighted graph: E(f) = sum_{x<y} c_xy (f(x) - f(y))^2.
Matrix graph_stiffness(const Matrix& conductance);

/// Spectral calculus of the generator M^{-1} A through the symmetric
/// matrix M^{-1/2} A M^{-1/2}. When A annihilates constants the zero mode
/// is split off exactly.
class SpectralGenerator {
 public:
  SpectralGenerator(const Matrix& stiffness, const Vector& mass);
  explicit SpectralGenerator(const FiniteDirichletSpace& backend)
      : SpectralGenerator(backend.stiffness, backend.space->mu()) {}

  std::size_t size() const { return static_cast<std::size_t>(lambda_.size()); }
  const Vector& eigenvalues() const { return lambda_; }
  bool conservative() const { return conservative_; }

  /// M^{-1/2} V phi(Lambda) V^T M^{1/2}
  Matrix function(const std::function<double(double)>& phi) const;
  /// P_t = exp(-t M^{-1} A)
  Matrix transition(double t) const;
  /// Spectral energy sum_k (1 - exp(-t lambda_k)) / t * c_k^2, c = V^T M^{1/2} f.
  double heat_energy(const Vector& f, double t) const;

 private:
  Vector lambda_;
  Matrix v_;
  Vector sqrt_m_;
  Vector inv_sqrt_m_;
  bool conservative_ = false;
};

/// j_t = P_t / (2t) off the diagonal.
Kernel heat_kernel(const FiniteDirichletSpace& backend, const SpectralGenerator& gen, double t);
Kernel heat_kernel(const FiniteDirichletSpace& backend, double t);

/// j_alpha = -1/2 L^alpha off the diagonal, L = M^{-1} A; equal to the
/// subordinated kernel 1/2 (alpha / Gamma(1 - alpha)) int P_t t^{-alpha-1} dt.
Kernel levy_kernel(const FiniteDirichletSpace& backend, const SpectralGenerator& gen,
                   double alpha);
Kernel levy_kernel(const FiniteDirichletSpace& backend, double alpha);

enum class BallNorm { continuum, moment };

double unit_ball_volume(int n);

/// j[x][y] = c 1{dist < r} mu[y]. `continuum`: c = (n+2)/(nu_n r^{n+2});
/// `moment`: c = n mu(X) / sum_x mu[x] sum_{y in B(x,r)} dist^2 mu[y], which
/// makes the second moment exact on homogeneous spaces.
Kernel ball_kernel(std::shared_ptr<const FiniteMetricMeasureSpace> space, int n, double r,
                   BallNorm norm = BallNorm::continuum);

/// {a, b} with unit weights, unit distance and E(f) = (f(a) - f(b))^2.
FiniteDirichletSpace two_point_space();

/// JSON document with `points` (optional), `dist` (optional if points),
/// `mu` (default ones) and `conductance` (optional, gives the form).
FiniteDirichletSpace load_space_file(const std::string& path);
FiniteDirichletSpace parse_space_json(const std::string& text, const std::string& name);

}  // namespace dcx::spaces
