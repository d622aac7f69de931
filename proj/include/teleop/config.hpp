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

// YAML scenario files.
//
//   scenario: {kind: A|B, mode: composite|classical, prediction: filtered|measured,
//              dt, horizon, log_stride, force_scale}
//   human:    {amplitude, start, stop}
//   wall:     {position, stiffness}
//   gains:    shared gain block applied to both sides
//   delays:   {master: {base, sinusoids: [{amplitude, omega}, ...]}, slave: {...}}
//   master:   {arm: {m1, m2, l1, l2, g}, theta_hat0: [5 values], gains: {...}}
//   slave:    same as master
//
// Missing keys keep the reference values for the chosen scenario kind. A gain
// block accepts K and Gamma as a scalar (times identity), a diagonal list or a
// full nested matrix.

#ifndef TELEOP_CONFIG_HPP
#define TELEOP_CONFIG_HPP

#include "teleop/sim.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace teleop {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed YAML, wrong types, unknown keys. Line is 1-based, 0 if unknown.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, int line, const std::string& field,
             const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Well-formed file whose values break a model invariant.
class ValidationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

ScenarioConfig parse_config(std::string_view text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved YAML with 17 significant digits; parse_config(dump_config(c)) == c.
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace teleop

#endif  // TELEOP_CONFIG_HPP
