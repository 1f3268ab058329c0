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
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dcx::cli {

inline constexpr int kFormatVersion = 1;

using Cell = std::variant<double, long, std::string>;

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Sweep rows plus check summary and config echo.
struct Report {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> config;
  std::string source;
  std::uint64_t seed = 0;

  void add_check(std::string name, bool pass, std::string detail = {});
  bool all_pass() const;
  /// Numeric column by name.
  std::vector<double> column(const std::string& name) const;

  std::string csv() const;
  std::string json() const;
  /// Writes PATH.csv and PATH.json.
  void write(const std::string& path) const;
};

/// %.17g
std::string format_double(double v);

}  // namespace dcx::cli
