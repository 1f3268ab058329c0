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

#include "dcx/spaces/finite.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dcx/error.hpp"

namespace dcx::spaces {
namespace {

using Index = Eigen::Index;

mms::RowMatrix off_diagonal(const Matrix& m, double scale) {
  mms::RowMatrix j = m * scale;
  for (Index i = 0; i < j.rows(); ++i) j(i, i) = 0.0;
  return j;
}

double clamp_for(const mms::RowMatrix& j) { return 1e-12 * j.cwiseAbs().maxCoeff(); }

/// Reconstruction round-off of M^{-1/2} V phi V^T M^{1/2} when |phi| <= phi_max.
double spectral_roundoff(const FiniteDirichletSpace& backend, double phi_max) {
  const Vector& mu = backend.space->mu();
  double n = static_cast<double>(mu.size());
  return n * std::numeric_limits<double>::epsilon() * std::sqrt(mu.maxCoeff() / mu.minCoeff()) *
         phi_max;
}

Matrix read_matrix(const nlohmann::json& v, const std::string& field) {
  if (!v.is_array()) throw DomainError("space file: `" + field + "` must be an array of rows");
  const Index rows = static_cast<Index>(v.size());
  Index cols = rows == 0 ? 0 : static_cast<Index>(v[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw DomainError("space file: `" + field + "` row " + std::to_string(i) +
                        " has the wrong length");
    }
    for (Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

}  // namespace

Matrix graph_stiffness(const Matrix& c) {
  if (c.rows() != c.cols()) throw DimensionError("conductance matrix must be square");
  const Index n = c.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      if (x == y) continue;
      if (c(x, y) != c(y, x)) throw DomainError("conductance matrix must be symmetric");
      if (c(x, y) < 0.0) throw DomainError("conductances must be nonnegative");
      a(x, y) -= c(x, y);
      a(x, x) += c(x, y);
    }
  }
  return a;
}

SpectralGenerator::SpectralGenerator(const Matrix& a, const Vector& mass) {
  const Index n = mass.size();
  if (a.rows() != n || a.cols() != n) {
    throw DimensionError("stiffness must be n x n with n = " + std::to_string(n));
  }
  for (Index i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) throw DomainError("reference weights must be positive");
  }
  const double amax = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * amax) {
    throw DomainError("stiffness matrix is not symmetric");
  }
  sqrt_m_ = mass.cwiseSqrt();
  inv_sqrt_m_ = sqrt_m_.cwiseInverse();
  Matrix s = inv_sqrt_m_.asDiagonal() * a * inv_sqrt_m_.asDiagonal();
  s = 0.5 * (s + s.transpose());
  conservative_ = (a * Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12 * amax * double(n);

  if (conservative_ && n > 1) {
    // Householder reflection taking sqrt(m) to a multiple of e_0
    Vector w = sqrt_m_;
    Vector v = w;
    v[0] += (w[0] >= 0.0 ? 1.0 : -1.0) * w.norm();
    const double beta = 2.0 / v.squaredNorm();
    Vector sv = s * v;
    const double vsv = v.dot(sv);
    Matrix b = s - beta * v * sv.transpose() - beta * sv * v.transpose() +
               beta * beta * vsv * v * v.transpose();
    Matrix block = b.bottomRightCorner(n - 1, n - 1);
    block = 0.5 * (block + block.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    Matrix x = Matrix::Zero(n, n);
    x(0, 0) = 1.0;
    x.bottomRightCorner(n - 1, n - 1) = es.eigenvectors();
    v_ = x - beta * v * (v.transpose() * x);
    lambda_.resize(n);
    lambda_[0] = 0.0;
    lambda_.tail(n - 1) = es.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    v_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
  }
  const double lmax = std::max(1.0, lambda_.cwiseAbs().maxCoeff());
  for (Index k = 0; k < n; ++k) {
    if (lambda_[k] < -1e-9 * lmax) throw DomainError("stiffness matrix is not positive semidefinite");
    if (lambda_[k] < 0.0) lambda_[k] = 0.0;
  }
}

Matrix SpectralGenerator::function(const std::function<double(double)>& phi) const {
  Vector d(lambda_.size());
  for (Index k = 0; k < lambda_.size(); ++k) d[k] = phi(lambda_[k]);
  Matrix left = inv_sqrt_m_.asDiagonal() * v_ * d.asDiagonal();
  Matrix right = v_.transpose() * sqrt_m_.asDiagonal();
  return left * right;
}

Matrix SpectralGenerator::transition(double t) const {
  if (!(t > 0.0)) throw DomainError("heat time must be positive");
  // I + expm1(-t L)
  Matrix p = function([t](double l) { return std::expm1(-t * l); });
  p.diagonal().array() += 1.0;
  return p;
}

double SpectralGenerator::heat_energy(const Vector& f, double t) const {
  Vector c = v_.transpose() * sqrt_m_.cwiseProduct(f);
  double e = 0.0;
  for (Index k = 0; k < c.size(); ++k) e += -std::expm1(-t * lambda_[k]) / t * c[k] * c[k];
  return e;
}

Kernel heat_kernel(const FiniteDirichletSpace& backend, const SpectralGenerator& gen, double t) {
  if (!(t > 0.0)) throw DomainError("heat time must be positive");
  mms::RowMatrix j = off_diagonal(gen.transition(t), 1.0 / (2.0 * t));
  std::ostringstream label;
  label << "heat t=" << t;
  double clamp = std::max(clamp_for(j), spectral_roundoff(backend, 1.0) / (2.0 * t));
  return Kernel(backend.space, std::move(j), label.str(), clamp);
}

Kernel heat_kernel(const FiniteDirichletSpace& backend, double t) {
  if (backend.stiffness.size() == 0) throw UnsupportedInput("backend has no Dirichlet form");
  return heat_kernel(backend, SpectralGenerator(backend), t);
}

Kernel levy_kernel(const FiniteDirichletSpace& backend, const SpectralGenerator& gen,
                   double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("levy alpha must lie in (0, 1)");
  Matrix la = gen.function([alpha](double l) { return l > 0.0 ? std::pow(l, alpha) : 0.0; });
  mms::RowMatrix j = off_diagonal(la, -0.5);
  std::ostringstream label;
  label << "levy a=" << alpha;
  double top = gen.size() == 0 ? 0.0 : std::pow(std::max(0.0, gen.eigenvalues().maxCoeff()), alpha);
  double clamp = std::max(clamp_for(j), 0.5 * spectral_roundoff(backend, top));
  return Kernel(backend.space, std::move(j), label.str(), clamp);
}

Kernel levy_kernel(const FiniteDirichletSpace& backend, double alpha) {
  if (backend.stiffness.size() == 0) throw UnsupportedInput("backend has no Dirichlet form");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("levy alpha must lie in (0, 1)");
  return levy_kernel(backend, SpectralGenerator(backend), alpha);
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

Kernel ball_kernel(std::shared_ptr<const FiniteMetricMeasureSpace> space, int n, double r,
                   BallNorm norm) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  if (n < 1) throw DomainError("ball kernel dimension must be positive");
  const std::size_t size = space->size();
  const Vector& mu = space->mu();
  double c = 0.0;
  if (norm == BallNorm::continuum) {
    c = (n + 2) / (unit_ball_volume(n) * std::pow(r, n + 2));
  } else {
    double second = 0.0;
    for (std::size_t x = 0; x < size; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < size; ++y) {
        double d = space->dist(x, y);
        if (y != x && d < r) row += d * d * mu[static_cast<Index>(y)];
      }
      second += mu[static_cast<Index>(x)] * row;
    }
    if (!(second > 0.0)) throw DomainError("ball radius below the point spacing");
    c = n * mu.sum() / second;
  }
  mms::RowMatrix j = mms::RowMatrix::Zero(static_cast<Index>(size), static_cast<Index>(size));
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t y = 0; y < size; ++y) {
      if (y != x && space->dist(x, y) < r) {
        j(static_cast<Index>(x), static_cast<Index>(y)) = c * mu[static_cast<Index>(y)];
      }
    }
  }
  std::ostringstream label;
  label << "ball r=" << r;
  return Kernel(std::move(space), std::move(j), label.str());
}

FiniteDirichletSpace two_point_space() {
  Matrix d(2, 2);
  d << 0.0, 1.0, 1.0, 0.0;
  Matrix c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  auto space = std::make_shared<const FiniteMetricMeasureSpace>(d, Vector::Ones(2));
  return FiniteDirichletSpace{space, graph_stiffness(c), "two_point"};
}

FiniteDirichletSpace parse_space_json(const std::string& text, const std::string& name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError("space file " + name + ": " + e.what());
  }
  if (!doc.is_object()) throw DomainError("space file " + name + ": top level must be an object");
  std::optional<Matrix> points;
  if (doc.contains("points")) points = read_matrix(doc["points"], "points");
  Matrix dist;
  if (doc.contains("dist")) {
    dist = read_matrix(doc["dist"], "dist");
  } else if (points) {
    dist = kas::FiniteMetricMeasureSpace::from_points(*points).dist();
  } else {
    throw DomainError("space file " + name + ": needs `dist` or `points`");
  }
  const Index n = dist.rows();
  Vector mu = Vector::Ones(n);
  if (doc.contains("mu")) {
    const auto& m = doc["mu"];
    if (!m.is_array() || static_cast<Index>(m.size()) != n) {
      throw DomainError("space file " + name + ": `mu` must have one weight per point");
    }
    for (Index i = 0; i < n; ++i) mu[i] = m[static_cast<std::size_t>(i)].get<double>();
  }
  auto space = std::make_shared<const FiniteMetricMeasureSpace>(dist, mu, points);
  Matrix stiffness;
  if (doc.contains("conductance")) {
    Matrix c = read_matrix(doc["conductance"], "conductance");
    if (c.rows() != n || c.cols() != n) {
      throw DomainError("space file " + name + ": `conductance` must be n x n");
    }
    stiffness = graph_stiffness(c);
  }
  return FiniteDirichletSpace{space, stiffness, name};
}

FiniteDirichletSpace load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open space file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_space_json(buf.str(), path);
}

}  // namespace dcx::spaces
