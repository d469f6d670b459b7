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

#include "jumpgame/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace jumpgame::io {

using nlohmann::json;

namespace {

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string values_csv(const GameModel& model, const ValueGrid& u) {
  std::string out = "t,state,value\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::string t = format_real(u.times()[i]);
    for (std::size_t x = 0; x < u.state_count(); ++x) {
      out += t;
      out += ',';
      out += model.states[x];
      out += ',';
      out += format_real(u(i, x));
      out += '\n';
    }
  }
  return out;
}

std::string policy_json(const GameModel& model, const MarkovPolicy& policy) {
  const auto cells = interval_cells(model.partition, policy.times);
  json entries = json::array();
  for (std::size_t i = 0; i < policy.interval_count(); ++i) {
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      const auto& d = model.at(cells[i], x);
      const auto& labels = policy.side == Side::maximizer ? d.actions_max : d.actions_min;
      json pairs = json::array();
      const auto s = policy.at(i, x);
      for (std::size_t k = 0; k < s.size(); ++k) pairs.push_back({labels[k], s[k]});
      entries.push_back({{"index", i},
                         {"time", policy.times[i]},
                         {"state", model.states[x]},
                         {"strategy", std::move(pairs)}});
    }
  }
  json root = {{"side", to_string(policy.side)},
               {"grid", policy.times},
               {"entries", std::move(entries)}};
  return dump(root);
}

MarkovPolicy parse_policy(const GameModel& model, std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("policy syntax error: ") + e.what());
  }
  if (!root.is_object() || !root.contains("side") || !root.contains("grid") ||
      !root.contains("entries")) {
    throw ParseError("policy: expected fields side, grid and entries");
  }
  MarkovPolicy policy;
  const std::string side = root.at("side").is_string() ? root.at("side").get<std::string>() : "";
  if (side == "maximizer") {
    policy.side = Side::maximizer;
  } else if (side == "minimizer") {
    policy.side = Side::minimizer;
  } else {
    throw ParseError("policy.side: expected \"maximizer\" or \"minimizer\"");
  }
  try {
    policy.times = root.at("grid").get<std::vector<double>>();
    check_time_grid(model.partition, policy.times);
  } catch (const json::exception& e) {
    throw ParseError(std::string("policy.grid: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("policy.grid: ") + e.what());
  }

  const std::size_t n = model.state_count();
  const std::size_t N = policy.times.size() - 1;
  const auto cells = interval_cells(model.partition, policy.times);
  policy.strategy.assign(N, std::vector<std::vector<double>>(n));
  std::vector<bool> seen(N * n, false);

  const json& entries = root.at("entries");
  if (!entries.is_array()) throw ParseError("policy.entries: expected an array");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string path = "policy.entries[" + std::to_string(e) + "]";
    const json& entry = entries[e];
    try {
      const auto i = entry.at("index").get<std::size_t>();
      if (i >= N) throw ParseError(path + ".index: out of range");
      if (entry.at("time").get<double>() != policy.times[i]) {
        throw ParseError(path + ".time: does not match grid point " + std::to_string(i));
      }
      const auto label = entry.at("state").get<std::string>();
      std::size_t x = 0;
      try {
        x = model.state_index(label);
      } catch (const std::out_of_range&) {
        throw ParseError(path + ".state: unknown state '" + label + "'");
      }
      if (seen[i * n + x]) throw ParseError(path + ": duplicate entry");
      seen[i * n + x] = true;

      const auto& d = model.at(cells[i], x);
      const auto& labels = policy.side == Side::maximizer ? d.actions_max : d.actions_min;
      std::vector<double> probs(labels.size(), 0.0);
      for (const auto& pair : entry.at("strategy")) {
        const auto action = pair.at(0).get<std::string>();
        auto it = std::find(labels.begin(), labels.end(), action);
        if (it == labels.end()) {
          throw ParseError(path + ".strategy: unknown action '" + action + "'");
        }
        probs[static_cast<std::size_t>(it - labels.begin())] = pair.at(1).get<double>();
      }
      policy.strategy[i][x] = std::move(probs);
    } catch (const json::exception& ex) {
      throw ParseError(path + ": " + ex.what());
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError("policy.entries: not every (interval, state) pair is covered");
  }
  try {
    check_policy(model, policy, policy.times);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("policy: ") + e.what());
  }
  return policy;
}

std::string diagnostics_json(const SolveDiagnostics& d) {
  json root = {{"iterations", d.iterations},
               {"deltas", d.deltas},
               {"monotonicity_violations", d.monotonicity_violations},
               {"envelope_violations", d.envelope_violations},
               {"max_monotonicity_violation", d.max_monotonicity_violation()},
               {"max_envelope_violation", d.max_envelope_violation()},
               {"observed_contraction", d.observed_contraction()},
               {"fixed_point_residual", d.fixed_point_residual}};
  return dump(root);
}

std::string report_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"id", c.id},
                      {"passed", c.passed},
                      {"worst_violation", c.worst_violation},
                      {"offending", c.offending}});
  }
  return dump({{"passed", report.all_passed()}, {"checks", std::move(checks)}});
}

std::string estimate_json(const PayoffEstimate& e) {
  return dump({{"mean", e.mean},
               {"standard_error", e.standard_error},
               {"paths", e.paths},
               {"seed", e.seed}});
}

std::string drift_report_json(const GameModel& model, const DriftCheckReport& r) {
  return dump({{"state", model.states.at(r.x0)},
               {"time", r.time},
               {"paths", r.paths},
               {"seed", r.seed},
               {"estimate", r.estimate},
               {"standard_error", r.standard_error},
               {"bound", r.bound},
               {"margin", r.margin},
               {"drift_passed", r.drift_passed},
               {"max_jumps", r.max_jumps},
               {"payoff_mean", r.payoff_mean},
               {"payoff_standard_error", r.payoff_standard_error},
               {"payoff_bound", r.payoff_bound},
               {"payoff_passed", r.payoff_passed},
               {"passed", r.passed()}});
}

std::string matrix_solution_json(const MatrixGameSolution& s) {
  return dump({{"value", s.value},
               {"lambda", s.lambda},
               {"mu", s.mu},
               {"residual", s.residual}});
}

std::string trajectories_csv(const GameModel& model, const std::vector<Trajectory>& paths) {
  std::string out = "path_id,jump_index,time,state\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    for (std::size_t j = 0; j < path.states.size(); ++j) {
      const double t = j == 0 ? 0.0 : path.jump_times[j - 1];
      out += std::to_string(p) + "," + std::to_string(j) + "," + format_real(t) + "," +
             model.states[path.states[j]] + "\n";
    }
  }
  return out;
}

Matrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": empty cell");
      const std::string token = cell.substr(b, e - b + 1);
      double v = 0.0;
      auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + token + "' is not a number");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file has no rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace jumpgame::io
