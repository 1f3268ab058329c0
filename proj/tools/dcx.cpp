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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dcx/cli/config.hpp"
#include "dcx/cli/experiments.hpp"
#include "dcx/parallel.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Args {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool no_timing = false;
  std::size_t count = 200;
};

void add_common(CLI::App* sub, Args& a, bool needs_config) {
  auto* c = sub->add_option("--config", a.config, "experiment config file");
  if (needs_config) c->required();
  sub->add_option("--out", a.out, "output prefix; writes PREFIX.csv and PREFIX.json");
  sub->add_option("--seed", a.seed, "fixture seed (overrides the config)");
  sub->add_option("--threads", a.threads, "worker threads, 0 for all cores");
  sub->add_flag("--no-timing", a.no_timing, "write 0 in the ms column");
}

void print_summary(const dcx::cli::Report& r) {
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << r.experiment << ": " << r.rows.size() << " rows, "
            << (r.all_pass() ? "all checks pass" : "check failures") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcx: nonlocal-to-local complexes on metric measure spaces"};
  app.require_subcommand(1);
  Args args;
  const char* experiments[] = {"converge-energy", "converge-det", "chain-map", "kas-cohomology"};
  for (const char* name : experiments) add_common(app.add_subcommand(name, name), args, true);
  auto* ids = app.add_subcommand("identities", "exact identity suites on rational fixtures");
  add_common(ids, args, false);
  ids->add_option("--count", args.count, "fixtures per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  dcx::cli::RunOptions opts;
  opts.timing = !args.no_timing;

  try {
    dcx::cli::Report report;
    std::string out = args.out;
    if (name == "identities") {
      std::uint64_t seed = args.seed.value_or(0);
      std::size_t count = args.count;
      if (!args.config.empty()) {
        auto raw = dcx::cli::Config::load(args.config);
        if (!args.seed) seed = static_cast<std::uint64_t>(raw.get_int("seed", 0));
        count = static_cast<std::size_t>(raw.get_int("count", static_cast<long>(count)));
        if (out.empty()) out = raw.get_string("output", "");
        if (args.threads) {
          dcx::set_thread_count(*args.threads);
        } else if (raw.has("threads")) {
          dcx::set_thread_count(static_cast<unsigned>(raw.get_int("threads", 0)));
        }
      } else if (args.threads) {
        dcx::set_thread_count(*args.threads);
      }
      report = dcx::cli::run_identities(seed, count, opts);
    } else {
      auto raw = dcx::cli::Config::load(args.config);
      if (args.seed) raw.set("seed", std::to_string(*args.seed));
      auto cfg = dcx::cli::resolve(raw, name);
      if (args.threads) {
        dcx::set_thread_count(*args.threads);
      } else if (raw.has("threads")) {
        dcx::set_thread_count(static_cast<unsigned>(raw.get_int("threads", 0)));
      }
      if (out.empty()) out = raw.get_string("output", "");
      report = dcx::cli::run_experiment(name, cfg, opts);
    }
    if (!out.empty()) report.write(out);
    print_summary(report);
    return report.all_pass() ? 0 : kExitFail;
  } catch (const dcx::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
