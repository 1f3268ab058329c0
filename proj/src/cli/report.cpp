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

#include "dcx/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dcx::cli {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return csv_field(std::get<std::string>(c));
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  if (const long* l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Report::add_check(std::string name, bool pass, std::string detail) {
  checks.push_back(Check{std::move(name), pass, std::move(detail)});
}

bool Report::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<double> Report::column(const std::string& name) const {
  std::size_t k = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) k = i;
  }
  if (k == columns.size()) throw std::out_of_range("no column " + name);
  std::vector<double> out;
  for (const auto& r : rows) {
    if (const double* d = std::get_if<double>(&r[k])) {
      out.push_back(*d);
    } else if (const long* l = std::get_if<long>(&r[k])) {
      out.push_back(static_cast<double>(*l));
    } else {
      out.push_back(std::nan(""));
    }
  }
  return out;
}

std::string Report::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i]);
    out += "\n";
  }
  return out;
}

std::string Report::json() const {
  nlohmann::ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["experiment"] = experiment;
  doc["source"] = source;
  doc["seed"] = seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  doc["config"] = cfg;
  doc["columns"] = columns;
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows_json.push_back(row);
  }
  doc["rows"] = rows_json;
  nlohmann::ordered_json checks_json = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  doc["checks"] = checks_json;
  doc["all_pass"] = all_pass();
  return doc.dump(2) + "\n";
}

void Report::write(const std::string& path) const {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_file(path + ".csv", csv());
  write_file(path + ".json", json());
}

}  // namespace dcx::cli
