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

// trajectory.csv: one row per log record, columns in TrajectoryRecord order,
// every value printed with %.9g.

#ifndef TELEOP_CSV_HPP
#define TELEOP_CSV_HPP

#include "teleop/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace teleop {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& trajectory_columns();

/// Values of one record in column order.
std::vector<double> flatten(const TrajectoryRecord& r);
TrajectoryRecord unflatten(const std::vector<double>& v);

/// Shortest-form 9 significant digits, as written to disk.
std::string format_value(double v);

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records);
void write_trajectory(const std::filesystem::path& path,
                      const std::vector<TrajectoryRecord>& records);

/// Throws CsvError on a header mismatch, short row or unparsable cell.
std::vector<TrajectoryRecord> read_trajectory(std::istream& in);
std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path);

}  // namespace teleop

#endif  // TELEOP_CSV_HPP
