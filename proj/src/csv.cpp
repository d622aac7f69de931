// Copyright 2026 The Teleop Authors
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

#include "teleop/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace teleop {
namespace {

void add(std::vector<std::string>& cols, const std::string& name, int n) {
  for (int i = 1; i <= n; ++i) cols.push_back(name + std::to_string(i));
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t"};
    add(c, "q_m", 2);
    add(c, "q_s", 2);
    add(c, "qd_m", 2);
    add(c, "qd_s", 2);
    add(c, "theta_hat_m", 5);
    add(c, "theta_hat_s", 5);
    add(c, "tau_m", 2);
    add(c, "tau_s", 2);
    add(c, "f_h", 2);
    add(c, "f_e", 2);
    add(c, "delta_p", 2);
    add(c, "delta_f", 2);
    c.insert(c.end(), {"lyapunov", "mu_m", "mu_s", "lambda_min_p_m", "lambda_min_p_s"});
    return c;
  }();
  return cols;
}

std::vector<double> flatten(const TrajectoryRecord& r) {
  std::vector<double> v;
  v.reserve(trajectory_columns().size());
  v.push_back(r.t);
  auto put = [&v](const auto& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) v.push_back(x(i));
  };
  put(r.q_m);
  put(r.q_s);
  put(r.qd_m);
  put(r.qd_s);
  put(r.theta_hat_m);
  put(r.theta_hat_s);
  put(r.tau_m);
  put(r.tau_s);
  put(r.f_h);
  put(r.f_e);
  put(r.delta_p);
  put(r.delta_f);
  v.insert(v.end(), {r.lyapunov, r.mu_m, r.mu_s, r.lambda_min_p_m, r.lambda_min_p_s});
  return v;
}

TrajectoryRecord unflatten(const std::vector<double>& v) {
  if (v.size() != trajectory_columns().size()) {
    throw CsvError("record needs " + std::to_string(trajectory_columns().size()) +
                   " values, got " + std::to_string(v.size()));
  }
  TrajectoryRecord r;
  std::size_t k = 0;
  r.t = v[k++];
  auto take = [&](auto& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = v[k++];
  };
  take(r.q_m);
  take(r.q_s);
  take(r.qd_m);
  take(r.qd_s);
  take(r.theta_hat_m);
  take(r.theta_hat_s);
  take(r.tau_m);
  take(r.tau_s);
  take(r.f_h);
  take(r.f_e);
  take(r.delta_p);
  take(r.delta_f);
  r.lyapunov = v[k++];
  r.mu_m = v[k++];
  r.mu_s = v[k++];
  r.lambda_min_p_m = v[k++];
  r.lambda_min_p_s = v[k++];
  return r;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string line;
  for (const auto& r : records) {
    line.clear();
    const auto v = flatten(r);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) line += ',';
      line += format_value(v[i]);
    }
    line += '\n';
    out << line;
  }
}

void write_trajectory(const std::filesystem::path& path,
                      const std::vector<TrajectoryRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write " + path.string());
  write_trajectory(out, records);
  if (!out) throw CsvError("write failed for " + path.string());
}

std::vector<TrajectoryRecord> read_trajectory(std::istream& in) {
  const auto& cols = trajectory_columns();
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::string expected;
    for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
    if (line != expected) throw CsvError("unexpected trajectory header: " + line);
  }
  std::vector<TrajectoryRecord> records;
  std::vector<double> values;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    values.clear();
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p || (errno == ERANGE && std::abs(v) == HUGE_VAL)) {
        throw CsvError("row " + std::to_string(row) + ": bad number near '" + std::string(p) +
                       "'");
      }
      values.push_back(v);
      if (*end == '\0') break;
      if (*end != ',') throw CsvError("row " + std::to_string(row) + ": expected ','");
      p = end + 1;
    }
    if (values.size() != cols.size()) {
      throw CsvError("row " + std::to_string(row) + ": expected " + std::to_string(cols.size()) +
                     " fields, got " + std::to_string(values.size()));
    }
    records.push_back(unflatten(values));
  }
  return records;
}

std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path.string());
  return read_trajectory(in);
}

}  // namespace teleop
