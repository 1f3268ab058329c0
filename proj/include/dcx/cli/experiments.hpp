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

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "dcx/cli/config.hpp"
#include "dcx/cli/report.hpp"
#include "dcx/kas.hpp"
#include "dcx/spaces/product_sg.hpp"
#include "dcx/spaces/sg.hpp"
#include "dcx/spaces/torus.hpp"

namespace dcx::cli {

using Vector = Eigen::VectorXd;

struct RunOptions {
  /// false writes 0 in the ms column, for byte-identical reports.
  bool timing = true;
};

Report run_converge_energy(const ExperimentConfig& cfg, const RunOptions& opts = {});
Report run_converge_det(const ExperimentConfig& cfg, const RunOptions& opts = {});
Report run_chain_map(const ExperimentConfig& cfg, const RunOptions& opts = {});
Report run_kas_cohomology(const ExperimentConfig& cfg, const RunOptions& opts = {});
/// Exact identity suites on random rational fixtures, `count` per suite.
Report run_identities(std::uint64_t seed, std::size_t count = 200, const RunOptions& opts = {});
/// Dispatch on the subcommand name.
Report run_experiment(const std::string& name, const ExperimentConfig& cfg,
                      const RunOptions& opts = {});

/// Grid resolution keeping at least `points_per_radius` points per radius.
int torus_resolution(int base, double r_min, double points_per_radius);

// Named fixtures.
using Rng = std::mt19937_64;

spaces::TrigPoly random_trig(Rng& rng, int n, int max_freq = 3);
spaces::TrigPoly torus_function(const std::string& name, int n, Rng& rng);
kas::ElementaryCochain<spaces::TrigPoly> torus_cochain(const std::string& name, int p, int n,
                                                       Rng& rng);

/// a0 + a1 h1 + a2 h2 + a3 h1^2 + a4 h1 h2 + a5 h2^2 on vertices.
Vector cylinder(const spaces::SGLevel& level, const std::array<double, 6>& a);
Vector sg_function(const std::string& name, const spaces::SGLevel& level, Rng& rng);
kas::ElementaryCochain<Vector> sg_cochain(const std::string& name, int p,
                                          const spaces::SGLevel& level, Rng& rng);

/// Product form E(F) = sum c c' [E1(a, c) <b, d> + <a, c> E2(b, d)].
double product_energy(const spaces::ProductSG& space, const spaces::TensorSum& f);

}  // namespace dcx::cli
