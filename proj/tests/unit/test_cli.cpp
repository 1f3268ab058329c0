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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "dcx/cli/config.hpp"
#include "dcx/cli/experiments.hpp"
#include "dcx/cli/report.hpp"

using namespace dcx::cli;

namespace {

const std::string kConfigs = std::string(DCX_SOURCE_DIR) + "/configs/";

int error_line(const std::string& text) {
  try {
    Config::parse(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

int resolve_line(const std::string& text, const std::string& experiment) {
  try {
    resolve(Config::parse(text, "t.cfg"), experiment);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config grammar") {
  auto c = Config::parse("# header\nexperiment = converge-energy  # trailing\n\nsweep t = 1, 0.5\np = 2\n");
  CHECK(c.get_string("experiment", "") == "converge-energy");
  CHECK(c.get_int("p", 0) == 2);
  CHECK(c.get_list("sweep t") == std::vector<double>{1.0, 0.5});
  CHECK(c.find("p")->line == 5);
  CHECK(c.get_double("eps", 0.25) == 0.25);
  CHECK_FALSE(c.has("eps"));
  auto echo = c.echo();
  REQUIRE(echo.size() == 3);
  CHECK(echo[0].first == "experiment");
  c.set("seed", "9");
  CHECK(c.get_int("seed", 0) == 9);

  CHECK(error_line("p = 1\nbogus = 3\n") == 2);
  CHECK(error_line("p = 1\n\np = 2\n") == 3);
  CHECK(error_line("experiment\n") == 1);
  CHECK(error_line("p =\n") == 1);
  CHECK(error_line("sweep  = 1\n") == 1);
  CHECK(error_line("p = 1\n") == -1);
  CHECK_THROWS_AS(Config::load("/nonexistent.cfg"), ConfigError);

  auto bad = Config::parse("p = two\nstaggered = maybe\nsweep r = 1, x\n");
  CHECK_THROWS_AS(bad.get_int("p", 0), ConfigError);
  CHECK_THROWS_AS(bad.get_bool("staggered", false), ConfigError);
  CHECK_THROWS_AS(bad.get_list("sweep r"), ConfigError);
  try {
    bad.get_int("p", 0);
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("t.cfg") == std::string::npos);
  }
}

TEST_CASE("backend and kernel grammar") {
  auto b = parse_backend("torus{2, 64}");
  CHECK(b.kind == BackendSpec::Kind::torus);
  CHECK(b.n == 2);
  CHECK(b.res == 64);
  CHECK(parse_backend("sg{6}").m == 6);
  CHECK(parse_backend("sg2{3}").kind == BackendSpec::Kind::sg2);
  CHECK(parse_backend("finite{x.json}").file == "x.json");
  CHECK_THROWS(parse_backend("torus{3, 64}"));
  CHECK_THROWS(parse_backend("torus{2}"));
  CHECK_THROWS(parse_backend("sphere{2}"));
  CHECK_THROWS(parse_backend("sg{9}"));
  CHECK_THROWS(parse_backend("sg{6"));
  auto k = parse_kernel("heat{t}");
  CHECK(k.kind == KernelSpec::Kind::heat);
  CHECK_FALSE(k.value.has_value());
  auto l = parse_kernel("levy{0.5}");
  CHECK(l.value == 0.5);
  CHECK_THROWS(parse_kernel("gauss{1}"));
  CHECK_THROWS(parse_kernel("ball{q}"));
  CHECK(std::string(kernel_param_name(KernelSpec::Kind::levy)) == "alpha");
}

TEST_CASE("resolve validates the experiment") {
  const std::string base = "experiment = converge-energy\nbackend = torus{1, 32}\n";
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1, 0.05\n", "converge-energy") == -1);
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1, 0.2\n", "converge-energy") == 4);
  CHECK(resolve_line(base + "kernel = heat{t}\nsweep r = 0.1, 0.05\n", "converge-energy") == 4);
  CHECK(resolve_line(base + "kernel = levy{alpha}\nsweep alpha = 0.9, 0.5\n", "converge-energy") == 4);
  CHECK(resolve_line(base + "kernel = levy{alpha}\nsweep alpha = 0.5, 1.5\n", "converge-energy") == 4);
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1, -0.05\n", "converge-energy") > 0);
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1\nsweep t = 1\n", "converge-energy") > 0);
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1\n", "converge-det") == 1);
  CHECK(resolve_line("experiment = converge-energy\nkernel = ball{r}\nsweep r = 0.1\n", "converge-energy") == 0);
  CHECK(resolve_line(base + "kernel = ball{r}\nsweep r = 0.1\np = -1\n", "converge-energy") == 5);
  CHECK(resolve_line(base + "backend = sg{3}\n", "converge-energy") == 3);

  auto cfg = resolve(Config::load(kConfigs + "two_point_heat.cfg"), "converge-energy");
  CHECK(cfg.backend.kind == BackendSpec::Kind::finite);
  CHECK(std::filesystem::exists(cfg.backend.file));
  CHECK(cfg.sweep_name == "t");
  CHECK(cfg.schedule.size() == 5);
}

TEST_CASE("report formats") {
  Report r;
  r.experiment = "demo";
  r.columns = {"name", "count", "value"};
  r.rows.push_back({std::string("a,b"), 3L, 0.1});
  r.rows.push_back({std::string("plain"), -1L, 1.0 / 3.0});
  r.config = {{"p", "1"}};
  r.seed = 4;
  r.add_check("ok", true);
  CHECK(r.all_pass());
  r.add_check("bad", false, "detail");
  CHECK_FALSE(r.all_pass());
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  std::string csv = r.csv();
  CHECK(csv.rfind("name,count,value\n", 0) == 0);
  CHECK(csv.find("\"a,b\",3,0.10000000000000001\n") != std::string::npos);
  auto j = nlohmann::json::parse(r.json());
  CHECK(j["format_version"] == kFormatVersion);
  CHECK(j["experiment"] == "demo");
  CHECK(j["seed"] == 4);
  CHECK(j["rows"][1][2].get<double>() == 1.0 / 3.0);
  CHECK(j["checks"][1]["pass"] == false);
  CHECK(j["all_pass"] == false);
  CHECK(r.column("value") == std::vector<double>{0.1, 1.0 / 3.0});

  auto dir = std::filesystem::temp_directory_path() / "dcx_report_test";
  std::filesystem::remove_all(dir);
  r.write((dir / "sub" / "out").string());
  CHECK(slurp((dir / "sub" / "out.csv").string()) == csv);
  CHECK(slurp((dir / "sub" / "out.json").string()) == r.json());
  std::filesystem::remove_all(dir);
}

TEST_CASE("runs are deterministic without timing") {
  RunOptions off;
  off.timing = false;
  auto cfg = resolve(Config::load(kConfigs + "two_point_heat.cfg"), "converge-energy");
  Report a = run_experiment("converge-energy", cfg, off);
  Report b = run_experiment("converge-energy", cfg, off);
  CHECK(a.csv() == b.csv());
  CHECK(a.json() == b.json());
  CHECK(a.all_pass());
  for (double ms : a.column("ms")) CHECK(ms == 0.0);

  auto kc = resolve(Config::load(kConfigs + "circle12.cfg"), "kas-cohomology");
  Report k = run_experiment("kas-cohomology", kc, off);
  CHECK(k.all_pass());
  CHECK(k.csv() == run_experiment("kas-cohomology", kc, off).csv());

  Report ids = run_identities(5, 10, off);
  CHECK(ids.all_pass());
  CHECK(ids.csv() == run_identities(5, 10, off).csv());
  CHECK_THROWS(run_experiment("nonsense", cfg, off));
}

TEST_CASE("constant fixtures give zero rows") {
  RunOptions off;
  off.timing = false;
  auto raw = Config::parse(
      "experiment = converge-energy\nbackend = torus{1, 32}\nkernel = ball{r}\n"
      "sweep r = 0.2, 0.1\nfixture = constant\n");
  Report r = run_experiment("converge-energy", resolve(raw, "converge-energy"), off);
  REQUIRE(r.rows.size() == 2);
  for (double v : r.column("nonlocal")) CHECK(v == 0.0);
  for (double v : r.column("local")) CHECK(v == 0.0);
  for (double v : r.column("abs_err")) CHECK(v == 0.0);
}

}  // TEST_SUITE
