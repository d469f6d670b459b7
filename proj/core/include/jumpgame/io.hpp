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

#include <string>
#include <string_view>
#include <vector>

#include "jumpgame/dynamics.hpp"
#include "jumpgame/matrix_game.hpp"
#include "jumpgame/model.hpp"
#include "jumpgame/solver.hpp"

// Text formats. JSON documents are written with sorted keys and two-space
// indentation; reals use the shortest representation that round-trips.
// Every document ends with a newline.
namespace jumpgame::io {

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// CSV with header `t,state,value`, one row per (grid point, state).
std::string values_csv(const GameModel& model, const ValueGrid& u);

// {"side", "grid", "entries": [{"index", "time", "state",
//   "strategy": [[action, probability], ...]}, ...]}
std::string policy_json(const GameModel& model, const MarkovPolicy& policy);

// Throws ParseError on malformed input or on state/action labels the model
// does not know.
MarkovPolicy parse_policy(const GameModel& model, std::string_view text);

std::string diagnostics_json(const SolveDiagnostics& diagnostics);
std::string report_json(const ValidationReport& report);
std::string estimate_json(const PayoffEstimate& estimate);
std::string drift_report_json(const GameModel& model, const DriftCheckReport& report);
std::string matrix_solution_json(const MatrixGameSolution& solution);

// CSV path_id,jump_index,time,state. Jump 0 is the initial state at time 0.
std::string trajectories_csv(const GameModel& model, const std::vector<Trajectory>& paths);

// Comma-separated reals, one matrix row per line; blank lines and lines
// starting with '#' are skipped.
Matrix parse_matrix_csv(std::string_view text);

}  // namespace jumpgame::io
