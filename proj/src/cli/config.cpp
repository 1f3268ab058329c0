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

#include "dcx/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dcx::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment", "backend", "kernel", "p", "eps", "fixture", "output", "seed", "threads",
      "points_per_radius", "quad_res", "ball_norm", "p_max", "cap", "staggered", "count",
      "expect.final_rel_err", "expect.rel_err", "expect.abs_err", "expect.monotone",
      "expect.ratio", "expect.ratio_tol", "expect.sup_rel_err", "expect.dims", "expect.trivial",
      "expect.residual", "expect.stagger_rel", "expect.nondecreasing"};
  return keys;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& out) {
  std::string t = trim(s);
  if (t.empty()) return false;
  const char* b = t.data();
  const char* e = b + t.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

// name{a, b, ...} or name
std::pair<std::string, std::vector<std::string>> call_syntax(const std::string& text) {
  std::string t = trim(text);
  auto open = t.find('{');
  if (open == std::string::npos) return {t, {}};
  if (t.back() != '}') throw std::invalid_argument("missing closing brace in `" + t + "`");
  std::string name = trim(t.substr(0, open));
  std::string inner = t.substr(open + 1, t.size() - open - 2);
  return {name, split(inner, ',')};
}

int to_int(const std::string& s, const std::string& what) {
  double v = 0.0;
  if (!parse_number(s, v) || v != std::floor(v)) {
    throw std::invalid_argument(what + " must be an integer, got `" + s + "`");
  }
  return static_cast<int>(v);
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         ": " + msg),
      line_(line) {}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  c.source_ = source;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, no, "expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("sweep", 0) == 0 && key.size() > 5 &&
        std::isspace(static_cast<unsigned char>(key[5]))) {
      std::string name = trim(key.substr(5));
      if (name.empty()) throw ConfigError(source, no, "sweep needs a parameter name");
      key = "sweep " + name;
    } else if (!known_keys().count(key)) {
      throw ConfigError(source, no, "unknown key `" + key + "`");
    }
    if (value.empty()) throw ConfigError(source, no, "empty value for `" + key + "`");
    if (c.entries_.count(key)) {
      throw ConfigError(source, no,
                        "duplicate key `" + key + "` (first on line " +
                            std::to_string(c.entries_[key].line) + ")");
    }
    c.entries_[key] = Entry{value, no};
    c.order_.push_back(key);
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  Config c = parse(buf.str(), path);
  c.base_dir_ = std::filesystem::path(path).parent_path().string();
  return c;
}

const Entry* Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, std::string>> Config::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : order_) out.emplace_back(k, entries_.at(k).value);
  return out;
}

void Config::fail(const std::string& key, const std::string& msg) const {
  const Entry* e = find(key);
  throw ConfigError(source_, e ? e->line : 0, "`" + key + "`: " + msg);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v)) fail(key, "expected a number, got `" + e->value + "`");
  return v;
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key, 0.0);
}

long Config::get_int(const std::string& key, long fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v) || v != std::floor(v)) {
    fail(key, "expected an integer, got `" + e->value + "`");
  }
  return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(key, "expected true or false, got `" + e->value + "`");
}

std::vector<double> Config::get_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return {};
  std::vector<double> out;
  for (const auto& item : split(e->value, ',')) {
    double v = 0.0;
    if (!parse_number(item, v)) fail(key, "bad list item `" + item + "`");
    out.push_back(v);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!entries_.count(key)) order_.push_back(key);
  entries_[key] = Entry{value, 0};
}

BackendSpec parse_backend(const std::string& text) {
  auto [name, args] = call_syntax(text);
  BackendSpec b;
  b.text = trim(text);
  if (name == "torus") {
    if (args.size() != 2) throw std::invalid_argument("torus{n, res} takes two arguments");
    b.kind = BackendSpec::Kind::torus;
    b.n = to_int(args[0], "torus dimension");
    b.res = to_int(args[1], "torus resolution");
    if (b.n != 1 && b.n != 2) throw std::invalid_argument("torus dimension must be 1 or 2");
    if (b.res < 3) throw std::invalid_argument("torus resolution must be at least 3");
  } else if (name == "finite") {
    if (args.size() != 1 || args[0].empty()) {
      throw std::invalid_argument("finite{file} takes one path");
    }
    b.kind = BackendSpec::Kind::finite;
    b.file = args[0];
  } else if (name == "sg" || name == "sg2") {
    if (args.size() != 1) throw std::invalid_argument(name + "{m} takes one level");
    b.kind = name == "sg" ? BackendSpec::Kind::sg : BackendSpec::Kind::sg2;
    b.m = to_int(args[0], "gasket level");
    if (b.m < 1 || b.m > 8) throw std::invalid_argument("gasket level must lie in [1, 8]");
  } else {
    throw std::invalid_argument("unknown backend `" + name + "`");
  }
  return b;
}

const char* kernel_param_name(KernelSpec::Kind kind) {
  switch (kind) {
    case KernelSpec::Kind::ball:
      return "r";
    case KernelSpec::Kind::heat:
      return "t";
    case KernelSpec::Kind::levy:
    default:
      return "alpha";
  }
}

KernelSpec parse_kernel(const std::string& text) {
  auto [name, args] = call_syntax(text);
  KernelSpec k;
  k.text = trim(text);
  if (name == "ball") {
    k.kind = KernelSpec::Kind::ball;
  } else if (name == "heat") {
    k.kind = KernelSpec::Kind::heat;
  } else if (name == "levy") {
    k.kind = KernelSpec::Kind::levy;
  } else {
    throw std::invalid_argument("unknown kernel `" + name + "`");
  }
  k.param = kernel_param_name(k.kind);
  if (args.size() > 1) throw std::invalid_argument(name + "{...} takes one argument");
  if (args.size() == 1) {
    double v = 0.0;
    if (parse_number(args[0], v)) {
      k.value = v;
    } else if (args[0] != k.param) {
      throw std::invalid_argument(name + "{...} expects a number or `" + k.param + "`");
    }
  }
  return k;
}

ExperimentConfig resolve(const Config& raw, const std::string& experiment) {
  ExperimentConfig c;
  c.raw = raw;
  c.experiment = experiment;
  if (raw.has("experiment") && raw.get_string("experiment", "") != experiment) {
    raw.fail("experiment", "config is for `" + raw.get_string("experiment", "") +
                               "`, not `" + experiment + "`");
  }
  if (!raw.has("backend")) throw ConfigError(raw.source(), 0, "missing `backend`");
  try {
    c.backend = parse_backend(raw.get_string("backend", ""));
  } catch (const std::invalid_argument& e) {
    raw.fail("backend", e.what());
  }
  if (c.backend.kind == BackendSpec::Kind::finite && !raw.base_dir().empty() &&
      std::filesystem::path(c.backend.file).is_relative()) {
    c.backend.file = (std::filesystem::path(raw.base_dir()) / c.backend.file).string();
  }

  std::vector<std::string> sweeps;
  for (const auto& [key, entry] : raw.entries()) {
    if (key.rfind("sweep ", 0) == 0) sweeps.push_back(key.substr(6));
  }
  if (sweeps.size() > 1) raw.fail("sweep " + sweeps[1], "only one sweep per config");

  const bool needs_kernel = experiment == "converge-energy" || experiment == "converge-det";
  if (raw.has("kernel")) {
    try {
      c.kernel = parse_kernel(raw.get_string("kernel", ""));
    } catch (const std::invalid_argument& e) {
      raw.fail("kernel", e.what());
    }
  } else if (needs_kernel) {
    throw ConfigError(raw.source(), 0, "missing `kernel`");
  }

  if (!sweeps.empty()) {
    c.sweep_name = sweeps[0];
    c.schedule = raw.get_list("sweep " + c.sweep_name);
    if (c.kernel && c.sweep_name != c.kernel->param) {
      raw.fail("sweep " + c.sweep_name, "kernel `" + c.kernel->text + "` sweeps `" +
                                            c.kernel->param + "`");
    }
    if (c.kernel && c.kernel->value) {
      raw.fail("kernel", "fixed kernel parameter conflicts with the sweep");
    }
    if (!c.kernel && c.sweep_name != "eps") {
      raw.fail("sweep " + c.sweep_name, "a sweep without a kernel must be over eps");
    }
  } else if (c.kernel) {
    if (!c.kernel->value) raw.fail("kernel", "needs a value or a sweep");
    c.sweep_name = c.kernel->param;
    c.schedule = {*c.kernel->value};
  }
  if ((needs_kernel || experiment == "kas-cohomology") && c.schedule.empty() &&
      !(experiment == "kas-cohomology" && raw.has("eps"))) {
    throw ConfigError(raw.source(), 0, "empty schedule");
  }
  if (c.schedule.size() > 1) {
    const std::string key = "sweep " + c.sweep_name;
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < c.schedule.size(); ++i) {
      inc = inc && c.schedule[i] > c.schedule[i - 1];
      dec = dec && c.schedule[i] < c.schedule[i - 1];
    }
    if (c.sweep_name == "alpha" && !inc) raw.fail(key, "alpha must increase strictly");
    if ((c.sweep_name == "r" || c.sweep_name == "t") && !dec) {
      raw.fail(key, c.sweep_name + " must decrease strictly");
    }
    if (!inc && !dec) raw.fail(key, "schedule must be strictly monotone");
  }
  for (double v : c.schedule) {
    if (!(v > 0.0)) raw.fail("sweep " + c.sweep_name, "schedule values must be positive");
    if (c.sweep_name == "alpha" && !(v < 1.0)) raw.fail("sweep alpha", "alpha must lie in (0, 1)");
  }

  long p = raw.get_int("p", experiment == "converge-det" ? 1 : 0);
  if (p < 0) raw.fail("p", "degree must be nonnegative");
  if (experiment == "converge-det" && p < 1) raw.fail("p", "converge-det needs p >= 1");
  c.p = static_cast<int>(p);

  if (raw.has("eps") && raw.get_string("eps", "") != "auto") {
    double e = raw.get_double("eps", 0.0);
    if (!(e > 0.0)) raw.fail("eps", "eps must be positive");
    c.eps = e;
  }
  if (experiment == "kas-cohomology" && c.schedule.empty()) {
    if (!c.eps) raw.fail("eps", "kas-cohomology needs eps or `sweep eps`");
    c.sweep_name = "eps";
    c.schedule = {*c.eps};
  }

  std::string fx = raw.get_string("fixture", "");
  if (!fx.empty()) {
    for (const auto& f : split(fx, ',')) {
      if (f.empty()) raw.fail("fixture", "empty fixture name");
      c.fixtures.push_back(f);
    }
  }
  long seed = raw.get_int("seed", 0);
  if (seed < 0) raw.fail("seed", "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  return c;
}

}  // namespace dcx::cli
