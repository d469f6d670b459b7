// Copyright 2026 The jumpgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jumpgame {

// Smallest uniformization rate assigned to a state whose exit rate is zero.
inline constexpr double kMinUniformizationRate = 1e-9;

// Raised by parse_model on malformed input. The message carries the line or
// field path where the problem was found.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Finite partition 0 = b_0 < b_1 < ... < b_K = T of the horizon. Cell k is
// the half-open interval [b_k, b_{k+1}); t = T belongs to the last cell.
class TimePartition {
 public:
  TimePartition() = default;
  explicit TimePartition(std::vector<double> boundaries);

  static TimePartition single_cell(double horizon);

  double horizon() const { return boundaries_.back(); }
  std::size_t cell_count() const { return boundaries_.size() - 1; }
  std::span<const double> boundaries() const { return boundaries_; }
  double cell_begin(std::size_t k) const { return boundaries_.at(k); }
  double cell_end(std::size_t k) const { return boundaries_.at(k + 1); }

  // Throws std::out_of_range for t outside [0, T].
  std::size_t cell_of(double t) const;

  bool operator==(const TimePartition&) const = default;

 private:
  std::vector<double> boundaries_{0.0, 1.0};
};

// Data of one state on one time cell: the admissible action lists of both
// players, the rate vectors q[a][b][y] and the reward rates r[a][b].
struct StateDynamics {
  std::vector<std::string> actions_max;
  std::vector<std::string> actions_min;
  std::vector<std::vector<std::vector<double>>> rates;
  std::vector<std::vector<double>> reward;

  std::size_t max_count() const { return actions_max.size(); }
  std::size_t min_count() const { return actions_min.size(); }

  bool operator==(const StateDynamics&) const = default;
};

// Weight functions and constants bounding the rates and rewards.
struct DriftCertificate {
  std::vector<double> w0;
  std::vector<double> w1;
  double c0 = 1.0;
  double c1 = 1.0;
  double M0 = 1.0;
  double M1 = 1.0;

  bool operator==(const DriftCertificate&) const = default;
};

// Finite-state, finite-action game with rates and rewards that are constant
// on each cell of a time partition.
struct GameModel {
  std::vector<std::string> states;
  TimePartition partition;
  // dynamics[k][x]
  std::vector<std::vector<StateDynamics>> dynamics;
  std::vector<double> terminal;
  // Uniformization rate per state; always populated once parsed.
  std::vector<double> uniformization;
  std::optional<DriftCertificate> certificate;

  std::size_t state_count() const { return states.size(); }
  std::size_t cell_count() const { return partition.cell_count(); }
  double horizon() const { return partition.horizon(); }

  const StateDynamics& at(std::size_t cell, std::size_t x) const {
    return dynamics[cell][x];
  }

  // Largest total exit rate out of x over all cells and action pairs.
  double exit_rate(std::size_t x) const;

  // Throws std::out_of_range for an unknown label.
  std::size_t state_index(std::string_view label) const;

  bool operator==(const GameModel&) const = default;
};

struct CheckResult {
  std::string id;
  bool passed = true;
  double worst_violation = 0.0;
  std::vector<std::string> offending;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::vector<const CheckResult*> failures() const;
  const CheckResult* find(std::string_view id) const;
  void append(const ValidationReport& other);
};

struct ValidationOptions {
  // Allowed |sum_y q(y)| per rate row.
  double row_tolerance = 1e-12;
  // Slack allowed in each inequality of the certificate check.
  double certificate_tolerance = 1e-12;
};

GameModel parse_model(std::string_view text);
std::string serialize_model(const GameModel& model);

ValidationReport validate_model(const GameModel& model,
                                const ValidationOptions& options = {});

// Constant weights w0 = w1 = 1 with constants taken from the model maxima.
DriftCertificate auto_certificate(const GameModel& model);

ValidationReport validate_certificate(const GameModel& model,
                                      const DriftCertificate& cert,
                                      const ValidationOptions& options = {});

// Transition probabilities delta_x + q(.|k,x,a,b) / m(x) of the uniformized
// chain.
std::vector<double> uniformized_kernel(const GameModel& model, std::size_t cell,
                                       std::size_t x, std::size_t a,
                                       std::size_t b);

}  // namespace jumpgame
