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
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace jumpgame::cli {

// Exit status contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // a quantitative check failed
inline constexpr int kExitInputError = 2;  // unreadable or malformed input

enum class Method { iterate, ode, both };

struct RunConfig {
  std::string subcommand;
  std::string model_path;
  std::size_t grid = 1000;
  double tol = 1e-8;
  double matrix_tol = 1e-9;
  double saddle_tol = 1e-3;
  double agreement_tol = 1e-3;
  double row_tol = 1e-12;
  double certificate_tol = 1e-12;
  std::size_t max_iter = 10000;
  Method method = Method::both;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  std::string out_values;
  std::string out_policy_max;
  std::string out_policy_min;
  std::string out_diagnostics;

  // Policy inputs for certify / simulate; recomputed when empty.
  std::string policy_max;
  std::string policy_min;

  std::optional<std::string> initial_state;
  std::optional<double> drift_time;
  std::string out_trajectories;
  std::size_t dump_paths = 100;

  std::string matrix_path;
};

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and dispatches to the subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jumpgame::cli
