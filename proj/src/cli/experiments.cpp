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

#include "dcx/cli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "dcx/error.hpp"
#include "dcx/forms.hpp"
#include "dcx/mms.hpp"
#include "dcx/parallel.hpp"
#include "dcx/spaces/finite.hpp"

namespace dcx::cli {
namespace {

using spaces::TorusGrid;
using spaces::TorusKernel;
using spaces::TrigPoly;
using Index = Eigen::Index;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double elapsed_ms(Clock::time_point start, const RunOptions& opts) {
  if (!opts.timing) return 0.0;
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Report start_report(const ExperimentConfig& cfg, std::vector<std::string> columns) {
  Report r;
  r.experiment = cfg.experiment;
  r.columns = std::move(columns);
  r.config = cfg.raw.echo();
  r.source = cfg.raw.source();
  r.seed = cfg.seed;
  return r;
}

std::string fixture_or(const ExperimentConfig& cfg, const std::string& fallback) {
  if (cfg.fixtures.empty()) return fallback;
  if (cfg.fixtures.size() > 1) cfg.raw.fail("fixture", "this experiment takes one fixture");
  return cfg.fixtures.front();
}

spaces::BallNorm ball_norm(const Config& raw) {
  std::string v = raw.get_string("ball_norm", "moment");
  if (v == "moment") return spaces::BallNorm::moment;
  if (v == "continuum") return spaces::BallNorm::continuum;
  raw.fail("ball_norm", "expected `moment` or `continuum`");
}

double rel(double abs_err, double local) {
  return local != 0.0 ? abs_err / std::abs(local) : abs_err;
}

std::string fmt(double v) { return format_double(v); }

struct SweepRow {
  double param = 0.0;
  double nonlocal = 0.0;
  double local = 0.0;
  double ms = 0.0;
};

void fill_rows(Report& r, const std::vector<SweepRow>& rows) {
  for (const auto& s : rows) {
    double a = std::abs(s.nonlocal - s.local);
    r.rows.push_back({s.param, s.nonlocal, s.local, a, rel(a, s.local), s.ms});
  }
}

/// Checks requested through expect.* keys on a sweep table.
void sweep_checks(Report& r, const Config& raw) {
  auto ab = r.column("abs_err");
  auto re = r.column("rel_err");
  auto nl = r.column("nonlocal");
  auto lo = r.column("local");
  if (ab.empty()) return;
  if (auto v = raw.get_optional_double("expect.final_rel_err")) {
    r.add_check("final_rel_err", re.back() < *v, fmt(re.back()) + " < " + fmt(*v));
  }
  if (auto v = raw.get_optional_double("expect.rel_err")) {
    double worst = *std::max_element(re.begin(), re.end());
    r.add_check("rel_err", worst < *v, "max " + fmt(worst) + " < " + fmt(*v));
  }
  if (auto v = raw.get_optional_double("expect.abs_err")) {
    double worst = *std::max_element(ab.begin(), ab.end());
    r.add_check("abs_err", worst <= *v, "max " + fmt(worst) + " <= " + fmt(*v));
  }
  if (raw.get_bool("expect.monotone", false)) {
    bool ok = true;
    for (std::size_t i = 1; i < ab.size(); ++i) ok = ok && ab[i] < ab[i - 1];
    r.add_check("errors_strictly_decreasing", ok);
  }
  if (raw.get_bool("expect.nondecreasing", false)) {
    bool ok = true;
    for (std::size_t i = 1; i < nl.size(); ++i) ok = ok && nl[i] >= nl[i - 1];
    r.add_check("nonlocal_nondecreasing", ok);
  }
  if (auto v = raw.get_optional_double("expect.sup_rel_err")) {
    double sup = *std::max_element(nl.begin(), nl.end());
    double e = rel(std::abs(sup - lo.back()), lo.back());
    r.add_check("sup_rel_err", e < *v, fmt(e) + " < " + fmt(*v));
  }
  if (auto v = raw.get_optional_double("expect.ratio")) {
    double tol = raw.get_double("expect.ratio_tol", 0.25);
    bool ok = ab.size() > 1;
    std::string detail;
    for (std::size_t i = 1; i < ab.size(); ++i) {
      double q = ab[i] > 0.0 ? ab[i - 1] / ab[i] : kInf;
      ok = ok && std::abs(q - *v) <= tol * *v;
      detail += (i > 1 ? ", " : "") + fmt(q);
    }
    r.add_check("error_ratio", ok, detail);
  }
}

// ---------------------------------------------------------------------------
// Fixture helpers

double product_energy_impl(const spaces::ProductSG& space, const spaces::TensorSum& f) {
  const auto& l1 = space.factor(0);
  const auto& l2 = space.factor(1);
  double e = 0.0;
  for (const auto& s : f.terms()) {
    for (const auto& t : f.terms()) {
      double ip2 = s.b.cwiseProduct(l2.vertex_weights()).dot(t.b);
      double ip1 = s.a.cwiseProduct(l1.vertex_weights()).dot(t.a);
      e += s.coeff * t.coeff * (l1.energy_bilinear(s.a, t.a) * ip2 + ip1 * l2.energy_bilinear(s.b, t.b));
    }
  }
  return e;
}

Vector random_poly(const spaces::SGLevel& level, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 6> a{};
  for (auto& c : a) c = u(rng);
  return cylinder(level, a);
}

spaces::TensorSum sg2_function(const std::string& name, const spaces::SGLevel& level, Rng& rng) {
  const Vector one = Vector::Ones(static_cast<Index>(level.vertex_count()));
  if (name == "h1_x_1") return spaces::TensorSum::pure(level.h1(), one);
  if (name == "1_x_h1") return spaces::TensorSum::pure(one, level.h1());
  if (name == "h1_x_h1") return spaces::TensorSum::pure(level.h1(), level.h1());
  if (name == "constant") return spaces::TensorSum::pure(one, one, 2.0);
  if (name == "random") {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    spaces::TensorSum s = spaces::TensorSum::pure(random_poly(level, rng), random_poly(level, rng), u(rng));
    s += spaces::TensorSum::pure(random_poly(level, rng), random_poly(level, rng), u(rng));
    return s;
  }
  throw UnsupportedInput("unknown product gasket fixture `" + name + "`");
}

/// Chain-map fixture families over a function generator.
template <class Fn>
kas::ElementaryCochain<Fn> chain_fixture(const std::string& name, int p,
                                         const std::function<Fn()>& gen, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto fs = [&](int k) {
    std::vector<Fn> out;
    for (int i = 0; i < k; ++i) out.push_back(gen());
    return out;
  };
  if (name == "degree0") {
    kas::ElementaryCochain<Fn> f(0);
    f.add_term(gen(), {});
    return f;
  }
  kas::ElementaryCochain<Fn> f(static_cast<std::size_t>(p));
  if (name == "single") {
    f.add_term(gen(), fs(p));
  } else if (name == "random3") {
    for (int i = 0; i < 3; ++i) f.add_term(gen(), fs(p), u(rng));
  } else if (name == "cancel") {
    Fn g = gen();
    std::vector<Fn> a = fs(p);
    std::vector<Fn> b = a;
    double sign = -1.0;
    if (p >= 2) {
      std::swap(b[0], b[1]);
      sign = 1.0;
    }
    f.add_term(g, a);
    f.add_term(g, b, sign);
  } else {
    throw UnsupportedInput("unknown chain-map fixture `" + name + "`");
  }
  return f;
}

template <forms::CarreField Field>
void chain_rows(Report& r, const ExperimentConfig& cfg, const Field& field,
                const std::function<typename Field::Function()>& gen, Rng& rng,
                const RunOptions& opts,
                const std::function<double(const kas::ElementaryCochain<typename Field::Function>&,
                                           double)>& nonlocal_norm) {
  std::vector<std::string> names = cfg.fixtures;
  if (names.empty()) names = {"single", "random3", "cancel", "degree0"};
  const double tol = cfg.raw.get_double("expect.residual", 1e-12);
  for (const auto& name : names) {
    auto start = Clock::now();
    auto f = chain_fixture<typename Field::Function>(name, cfg.p, gen, rng);
    double residual = forms::chain_map_residual(field, f);
    double norm = forms::form_norm_l2(field, forms::localize(f));
    r.rows.push_back({name, std::string(), residual, norm, std::string(), elapsed_ms(start, opts)});
    r.add_check("residual " + name, residual < tol, fmt(residual) + " < " + fmt(tol));
    if (name == "cancel") {
      r.add_check("cancel form norm is zero", norm == 0.0, fmt(norm));
      if (nonlocal_norm) {
        for (double param : cfg.schedule) {
          auto s = Clock::now();
          double v = nonlocal_norm(f, param);
          r.rows.push_back({name, param, residual, norm, v, elapsed_ms(s, opts)});
        }
      }
    }
  }
}

double auto_eps(const ExperimentConfig& cfg, double fallback) {
  return cfg.eps ? *cfg.eps : fallback;
}

}  // namespace

int torus_resolution(int base, double r_min, double points_per_radius) {
  double need = std::ceil(points_per_radius / r_min - 1e-9);
  return std::max(base, static_cast<int>(need));
}

// ---------------------------------------------------------------------------
// Fixtures

TrigPoly random_trig(Rng& rng, int n, int max_freq) {
  std::uniform_int_distribution<int> terms(1, 3);
  std::uniform_int_distribution<int> freq(-max_freq, max_freq);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::bernoulli_distribution use_sin(0.5);
  TrigPoly f;
  int k = terms(rng);
  for (int i = 0; i < k; ++i) {
    spaces::Freq q{0, 0};
    while (q[0] == 0 && q[1] == 0) q = {freq(rng), n == 2 ? freq(rng) : 0};
    double a = amp(rng);
    f += use_sin(rng) ? TrigPoly::sin_mode(q, a) : TrigPoly::cos_mode(q, a);
  }
  return f;
}

TrigPoly torus_function(const std::string& name, int n, Rng& rng) {
  if (name == "sin1") return TrigPoly::sin_mode({1, 0});
  if (name == "sin2") {
    if (n != 2) throw UnsupportedInput("fixture sin2 needs a 2-torus");
    return TrigPoly::sin_mode({0, 1});
  }
  if (name == "mix") {
    return TrigPoly::sin_mode({1, 0}) + TrigPoly::cos_mode({2, n == 2 ? 1 : 0}, 0.5);
  }
  if (name == "constant") return TrigPoly::constant(2.5);
  if (name == "random") return random_trig(rng, n);
  throw UnsupportedInput("unknown torus fixture `" + name + "`");
}

kas::ElementaryCochain<TrigPoly> torus_cochain(const std::string& name, int p, int n, Rng& rng) {
  kas::ElementaryCochain<TrigPoly> f(static_cast<std::size_t>(p));
  const TrigPoly one = TrigPoly::constant(1.0);
  if (name == "sin_sin") {
    if (p != 2 || n != 2) throw UnsupportedInput("fixture sin_sin is a degree-2 form on the 2-torus");
    f.add_term(one, {TrigPoly::sin_mode({1, 0}), TrigPoly::sin_mode({0, 1})});
    return f;
  }
  if (name == "random" || name == "smooth") {
    const int freq = name == "smooth" ? 1 : 3;
    std::vector<TrigPoly> fs;
    for (int i = 0; i < p; ++i) fs.push_back(random_trig(rng, n, freq));
    f.add_term(one + random_trig(rng, n, 1) * 0.3, fs);
    return f;
  }
  if (p != 1) throw UnsupportedInput("fixture `" + name + "` has degree 1");
  f.add_term(one, {torus_function(name, n, rng)});
  return f;
}

Vector cylinder(const spaces::SGLevel& level, const std::array<double, 6>& a) {
  const Vector& x = level.h1();
  const Vector& y = level.h2();
  Vector out = Vector::Constant(x.size(), a[0]) + a[1] * x + a[2] * y;
  out += a[3] * x.cwiseProduct(x) + a[4] * x.cwiseProduct(y) + a[5] * y.cwiseProduct(y);
  return out;
}

Vector sg_function(const std::string& name, const spaces::SGLevel& level, Rng& rng) {
  if (name == "h1") return level.h1();
  if (name == "h2") return level.h2();
  if (name == "cylinder") return cylinder(level, {0.0, 0.0, -1.0, 1.0, 0.5, 0.0});
  if (name == "constant") return Vector::Constant(static_cast<Index>(level.vertex_count()), 2.5);
  if (name == "random") return random_poly(level, rng);
  throw UnsupportedInput("unknown gasket fixture `" + name + "`");
}

kas::ElementaryCochain<Vector> sg_cochain(const std::string& name, int p,
                                          const spaces::SGLevel& level, Rng& rng) {
  kas::ElementaryCochain<Vector> f(static_cast<std::size_t>(p));
  const Vector one = Vector::Ones(static_cast<Index>(level.vertex_count()));
  if (name == "random") {
    std::vector<Vector> fs;
    for (int i = 0; i < p; ++i) fs.push_back(random_poly(level, rng));
    f.add_term(one + 0.3 * random_poly(level, rng), fs);
    return f;
  }
  if (p != 1) throw UnsupportedInput("fixture `" + name + "` has degree 1");
  f.add_term(one, {sg_function(name, level, rng)});
  return f;
}

double product_energy(const spaces::ProductSG& space, const spaces::TensorSum& f) {
  return product_energy_impl(space, f);
}

// ---------------------------------------------------------------------------
// converge-energy

Report run_converge_energy(const ExperimentConfig& cfg, const RunOptions& opts) {
  Report r = start_report(cfg, {"param", "nonlocal", "local", "abs_err", "rel_err", "ms"});
  Rng rng(cfg.seed);
  const auto& b = cfg.backend;
  const auto kind = cfg.kernel->kind;
  const std::size_t points = cfg.schedule.size();
  std::vector<SweepRow> rows(points);
  using BK = BackendSpec::Kind;
  using KK = KernelSpec::Kind;

  if (b.kind == BK::torus) {
    TrigPoly f = torus_function(fixture_or(cfg, "sin1"), b.n, rng);
    const double ppr = cfg.raw.get_double("points_per_radius", 50.0);
    const auto norm = ball_norm(cfg.raw);
    parallel_for(points, [&](std::size_t i) {
      auto start = Clock::now();
      double v = cfg.schedule[i];
      SweepRow row{v, 0.0, 0.0, 0.0};
      if (kind == KK::ball) {
        TorusGrid grid(b.n, torus_resolution(b.res, v, ppr));
        row.nonlocal = TorusKernel::ball(grid, v, norm).energy(f);
        row.local = spaces::dirichlet_energy(f, b.n);
      } else {
        TorusGrid grid(b.n, b.res);
        TorusKernel k = kind == KK::heat ? TorusKernel::heat(grid, v) : TorusKernel::levy(grid, v);
        row.nonlocal = k.energy(f);
        row.local = spaces::grid_dirichlet_energy(f, grid);
      }
      row.ms = elapsed_ms(start, opts);
      rows[i] = row;
    });
  } else if (b.kind == BK::finite || b.kind == BK::sg) {
    std::unique_ptr<spaces::SGLevel> level;
    spaces::FiniteDirichletSpace backend;
    Vector f;
    if (b.kind == BK::sg) {
      level = std::make_unique<spaces::SGLevel>(b.m);
      backend = level->dirichlet_space();
      f = sg_function(fixture_or(cfg, "cylinder"), *level, rng);
    } else {
      backend = spaces::load_space_file(b.file);
      std::string name = fixture_or(cfg, "indicator");
      const Index n = static_cast<Index>(backend.size());
      if (name == "indicator") {
        f = Vector::Unit(n, 0);
      } else if (name == "constant") {
        f = Vector::Constant(n, 2.5);
      } else if (name == "random") {
        std::normal_distribution<double> g;
        f.resize(n);
        for (Index i = 0; i < n; ++i) f[i] = g(rng);
      } else {
        cfg.raw.fail("fixture", "unknown finite fixture `" + name + "`");
      }
    }
    if (backend.stiffness.size() == 0) {
      throw UnsupportedInput("backend " + backend.name + " has no Dirichlet form to compare with");
    }
    const double local = backend.energy(f);
    std::unique_ptr<spaces::SpectralGenerator> gen;
    if (kind != KK::ball) gen = std::make_unique<spaces::SpectralGenerator>(backend);
    if (kind == KK::ball) {
      if (b.kind == BK::sg) throw UnsupportedInput("ball kernels on the gasket: use finite{file}");
      if (!backend.space->points()) throw UnsupportedInput("ball kernels need point coordinates");
    }
    parallel_for(points, [&](std::size_t i) {
      auto start = Clock::now();
      double v = cfg.schedule[i];
      double e = 0.0;
      if (kind == KK::heat) {
        e = mms::energy_theta(f, spaces::heat_kernel(backend, *gen, v));
      } else if (kind == KK::levy) {
        e = mms::energy_theta(f, spaces::levy_kernel(backend, *gen, v));
      } else {
        int dim = static_cast<int>(backend.space->points()->cols());
        e = mms::energy_theta(f, spaces::ball_kernel(backend.space, dim, v, ball_norm(cfg.raw)));
      }
      rows[i] = SweepRow{v, e, local, elapsed_ms(start, opts)};
    });
  } else {
    if (kind != KK::heat) throw UnsupportedInput("the product gasket carries heat kernels only");
    spaces::ProductSG space(b.m, b.m);
    spaces::TensorSum f = sg2_function(fixture_or(cfg, "h1_x_h1"), space.factor(0), rng);
    const double local = product_energy(space, f);
    parallel_for(points, [&](std::size_t i) {
      auto start = Clock::now();
      double v = cfg.schedule[i];
      double e = spaces::KroneckerKernel(space, v).energy(f);
      rows[i] = SweepRow{v, e, local, elapsed_ms(start, opts)};
    });
  }
  fill_rows(r, rows);
  sweep_checks(r, cfg.raw);
  return r;
}

// ---------------------------------------------------------------------------
// converge-det

Report run_converge_det(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto& b = cfg.backend;
  const bool staggered = cfg.raw.get_bool("staggered", false);
  Rng rng(cfg.seed);
  const std::size_t p = static_cast<std::size_t>(cfg.p);
  const double scale = mms::localization_scale(p);
  using BK = BackendSpec::Kind;

  if (b.kind == BK::torus) {
    if (cfg.kernel->kind != KernelSpec::Kind::ball) {
      throw UnsupportedInput("torus determinant sweeps use ball kernels");
    }
    auto f = torus_cochain(fixture_or(cfg, p == 2 ? "sin_sin" : "sin1"), cfg.p, b.n, rng);
    const int quad = static_cast<int>(cfg.raw.get_int("quad_res", 64));
    spaces::TorusField field(b.n, quad);
    const double local = scale * forms::form_l2_inner(field, forms::localize(f), forms::localize(f));
    const double ppr = cfg.raw.get_double("points_per_radius", 50.0);
    const auto norm = ball_norm(cfg.raw);
    auto value = [&](const std::vector<double>& radii) {
      double rmin = *std::min_element(radii.begin(), radii.end());
      double rmax = *std::max_element(radii.begin(), radii.end());
      TorusGrid grid(b.n, torus_resolution(b.res, rmin, ppr));
      std::vector<TorusKernel> ks;
      for (double rr : radii) ks.push_back(TorusKernel::ball(grid, rr, norm));
      spaces::TorusKernelList list;
      for (const auto& k : ks) list.push_back(&k);
      return spaces::nonlocal_inner_total(f, f, list, auto_eps(cfg, 2.0 * rmax));
    };
    if (!staggered) {
      Report r = start_report(cfg, {"param", "nonlocal", "local", "abs_err", "rel_err", "ms"});
      std::vector<SweepRow> rows(cfg.schedule.size());
      parallel_for(rows.size(), [&](std::size_t i) {
        auto start = Clock::now();
        double v = value(std::vector<double>(p, cfg.schedule[i]));
        rows[i] = SweepRow{cfg.schedule[i], v, local, elapsed_ms(start, opts)};
      });
      fill_rows(r, rows);
      sweep_checks(r, cfg.raw);
      return r;
    }
    if (p < 2 || cfg.schedule.size() < 2) {
      cfg.raw.fail("staggered", "staggered schedules need p >= 2 and two sweep points");
    }
    Report r = start_report(cfg, {"param", "param2", "nonlocal", "nonlocal_swapped", "local",
                                  "abs_err", "rel_err", "swap_rel", "ms"});
    const std::size_t k = cfg.schedule.size() - 1;
    std::vector<std::array<double, 3>> vals(k);
    parallel_for(k, [&](std::size_t i) {
      auto start = Clock::now();
      std::vector<double> radii(p, cfg.schedule[i + 1]);
      radii[0] = cfg.schedule[i];
      double a = value(radii);
      std::reverse(radii.begin(), radii.end());
      double c = value(radii);
      vals[i] = {a, c, elapsed_ms(start, opts)};
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double a = vals[i][0], c = vals[i][1];
      double err = std::abs(a - local);
      double swap = std::abs(a - c) / std::max(std::abs(a), std::abs(c));
      worst = std::max(worst, swap);
      r.rows.push_back({cfg.schedule[i], cfg.schedule[i + 1], a, c, local, err, rel(err, local), swap,
                        vals[i][2]});
    }
    double tol = cfg.raw.get_double("expect.stagger_rel", 0.01);
    r.add_check("staggered_permutation_agreement", worst < tol, fmt(worst) + " < " + fmt(tol));
    sweep_checks(r, cfg.raw);
    return r;
  }

  if (b.kind == BK::sg) {
    if (cfg.kernel->kind == KernelSpec::Kind::ball) {
      throw UnsupportedInput("ball kernels on the gasket: use finite{file}");
    }
    spaces::SGLevel level(b.m);
    auto backend = level.dirichlet_space();
    spaces::SpectralGenerator gen(backend);
    auto f = sg_cochain(fixture_or(cfg, "cylinder"), cfg.p, level, rng);
    spaces::SGField field(level);
    const double local = scale * forms::form_l2_inner(field, forms::localize(f), forms::localize(f));
    const double eps = auto_eps(cfg, 2.0 * backend.space->diameter() + 1.0);
    Report r = start_report(cfg, {"param", "nonlocal", "local", "abs_err", "rel_err", "ms"});
    std::vector<SweepRow> rows(cfg.schedule.size());
    parallel_for(rows.size(), [&](std::size_t i) {
      auto start = Clock::now();
      double v = cfg.schedule[i];
      mms::Kernel k = cfg.kernel->kind == KernelSpec::Kind::heat ? spaces::heat_kernel(backend, gen, v)
                                                                 : spaces::levy_kernel(backend, gen, v);
      mms::KernelList list(p, &k);
      rows[i] = SweepRow{v, mms::nonlocal_inner_total(f, f, list, eps), local, elapsed_ms(start, opts)};
    });
    fill_rows(r, rows);
    sweep_checks(r, cfg.raw);
    return r;
  }
  throw UnsupportedInput("converge-det needs a torus or sg backend with a local target");
}

// ---------------------------------------------------------------------------
// chain-map

Report run_chain_map(const ExperimentConfig& cfg, const RunOptions& opts) {
  Report r = start_report(cfg, {"fixture", "param", "residual", "form_norm", "nonlocal_norm", "ms"});
  Rng rng(cfg.seed);
  const auto& b = cfg.backend;
  using BK = BackendSpec::Kind;
  if (b.kind == BK::torus) {
    const int quad = static_cast<int>(cfg.raw.get_int("quad_res", 64));
    spaces::TorusField field(b.n, quad);
    std::function<TrigPoly()> gen = [&] { return random_trig(rng, b.n) + random_trig(rng, b.n); };
    std::function<double(const kas::ElementaryCochain<TrigPoly>&, double)> nl;
    if (cfg.kernel && cfg.kernel->kind == KernelSpec::Kind::ball && cfg.p >= 1) {
      const double ppr = cfg.raw.get_double("points_per_radius", 50.0);
      const auto norm = ball_norm(cfg.raw);
      nl = [&, ppr, norm](const kas::ElementaryCochain<TrigPoly>& f, double rr) {
        TorusGrid grid(b.n, torus_resolution(b.res, rr, ppr));
        TorusKernel k = TorusKernel::ball(grid, rr, norm);
        spaces::TorusKernelList list(static_cast<std::size_t>(cfg.p), &k);
        double v = spaces::nonlocal_inner_total(f, f, list, auto_eps(cfg, 2.0 * rr));
        return std::sqrt(std::max(0.0, v));
      };
    }
    chain_rows(r, cfg, field, gen, rng, opts, nl);
  } else if (b.kind == BK::sg) {
    spaces::SGLevel level(b.m);
    spaces::SGField field(level);
    std::function<Vector()> gen = [&] { return random_poly(level, rng); };
    chain_rows(r, cfg, field, gen, rng, opts, {});
  } else if (b.kind == BK::sg2) {
    spaces::ProductSG space(b.m, b.m);
    spaces::ProductField field(space);
    std::function<spaces::TensorSum()> gen = [&] { return sg2_function("random", space.factor(0), rng); };
    chain_rows(r, cfg, field, gen, rng, opts, {});
  } else {
    throw UnsupportedInput("chain-map needs a torus, sg or sg2 backend");
  }
  return r;
}

// ---------------------------------------------------------------------------
// kas-cohomology

Report run_kas_cohomology(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.backend.kind != BackendSpec::Kind::finite) {
    throw UnsupportedInput("kas-cohomology needs a finite{file} backend");
  }
  auto backend = spaces::load_space_file(cfg.backend.file);
  const long p_max = cfg.raw.get_int("p_max", 2);
  if (p_max < 0) cfg.raw.fail("p_max", "must be nonnegative");
  const long cap = cfg.raw.get_int("cap", static_cast<long>(kas::kDefaultTupleCap));
  if (cap <= 0) cfg.raw.fail("cap", "must be positive");
  std::vector<std::string> cols = {"eps"};
  for (long q = 0; q <= p_max; ++q) cols.push_back("h" + std::to_string(q));
  cols.push_back("ms");
  Report r = start_report(cfg, cols);
  const double diam = backend.space->diameter();
  std::vector<std::vector<std::size_t>> dims(cfg.schedule.size());
  std::vector<double> ms(cfg.schedule.size());
  parallel_for(cfg.schedule.size(), [&](std::size_t i) {
    auto start = Clock::now();
    dims[i] = kas::kas_cohomology_dims(*backend.space, cfg.schedule[i],
                                       static_cast<std::size_t>(p_max),
                                       static_cast<std::size_t>(cap));
    ms[i] = elapsed_ms(start, opts);
  });
  std::vector<double> expect = cfg.raw.get_list("expect.dims");
  bool trivial = cfg.raw.get_bool("expect.trivial", false);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    std::vector<Cell> row = {cfg.schedule[i]};
    for (auto d : dims[i]) row.emplace_back(static_cast<long>(d));
    row.emplace_back(ms[i]);
    r.rows.push_back(row);
    std::ostringstream label;
    label << "eps=" << fmt(cfg.schedule[i]);
    if (cfg.schedule[i] > diam || trivial) {
      bool ok = true;
      for (std::size_t q = 1; q < dims[i].size(); ++q) ok = ok && dims[i][q] == 0;
      r.add_check("trivial H^p, p >= 1, " + label.str(), ok);
    }
    if (!expect.empty()) {
      bool ok = true;
      std::string got;
      for (std::size_t q = 0; q < expect.size(); ++q) {
        std::size_t d = q < dims[i].size() ? dims[i][q] : 0;
        ok = ok && q < dims[i].size() && static_cast<double>(d) == expect[q];
        got += (q ? "," : "") + std::to_string(d);
      }
      r.add_check("dims " + label.str(), ok, got);
    }
  }
  return r;
}

Report run_experiment(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts) {
  if (name == "converge-energy") return run_converge_energy(cfg, opts);
  if (name == "converge-det") return run_converge_det(cfg, opts);
  if (name == "chain-map") return run_chain_map(cfg, opts);
  if (name == "kas-cohomology") return run_kas_cohomology(cfg, opts);
  throw UnsupportedInput("unknown experiment `" + name + "`");
}

}  // namespace dcx::cli
