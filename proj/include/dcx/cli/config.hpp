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

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcx::cli {

/// Malformed or invalid configuration; line is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct Entry {
  std::string value;
  int line = 0;
};

/// Flat `key = value` text. `#` starts a comment; sweeps are written
/// `sweep NAME = v1, v2, ...`.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  const std::string& source() const { return source_; }
  /// Directory of the config file, for relative paths.
  const std::string& base_dir() const { return base_dir_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry* find(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }
  /// Ordered (key, value) echo.
  std::vector<std::pair<std::string, std::string>> echo() const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;
  std::optional<double> get_optional_double(const std::string& key) const;

  /// Sets or replaces a key without a source line (command line overrides).
  void set(const std::string& key, const std::string& value);

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

 private:
  std::string source_;
  std::string base_dir_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

struct BackendSpec {
  enum class Kind { torus, finite, sg, sg2 };
  Kind kind = Kind::torus;
  int n = 0;
  int res = 0;
  int m = 0;
  std::string file;
  std::string text;
};

struct KernelSpec {
  enum class Kind { ball, heat, levy };
  Kind kind = Kind::ball;
  /// Sweep variable name (r, t or alpha).
  std::string param;
  std::optional<double> value;
  std::string text;
};

BackendSpec parse_backend(const std::string& text);
KernelSpec parse_kernel(const std::string& text);
const char* kernel_param_name(KernelSpec::Kind kind);

struct ExperimentConfig {
  Config raw;
  std::string experiment;
  BackendSpec backend;
  std::optional<KernelSpec> kernel;
  std::string sweep_name;
  std::vector<double> schedule;
  int p = 1;
  std::optional<double> eps;
  std::vector<std::string> fixtures;
  std::uint64_t seed = 0;
};

/// Validates the grammar and the schedule for the given experiment.
ExperimentConfig resolve(const Config& raw, const std::string& experiment);

}  // namespace dcx::cli
