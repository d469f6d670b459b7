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

#include "jumpgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace jumpgame {

using nlohmann::json;

TimePartition::TimePartition(std::vector<double> boundaries)
    : boundaries_(std::move(boundaries)) {
  if (boundaries_.size() < 2) {
    throw std::invalid_argument("time partition needs at least two boundaries");
  }
  if (boundaries_.front() != 0.0) {
    throw std::invalid_argument("time partition must start at 0");
  }
  for (std::size_t k = 1; k < boundaries_.size(); ++k) {
    if (!(boundaries_[k] > boundaries_[k - 1]) || !std::isfinite(boundaries_[k])) {
      throw std::invalid_argument("time partition boundaries must be strictly increasing");
    }
  }
}

TimePartition TimePartition::single_cell(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  return TimePartition({0.0, horizon});
}

std::size_t TimePartition::cell_of(double t) const {
  if (!(t >= 0.0) || t > horizon()) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
  }
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
  auto k = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
  return std::min(k, cell_count() - 1);
}

double GameModel::exit_rate(std::size_t x) const {
  double rate = 0.0;
  for (const auto& cell : dynamics) {
    for (const auto& row : cell[x].rates) {
      for (const auto& q : row) rate = std::max(rate, -q[x]);
    }
  }
  return rate;
}

std::size_t GameModel::state_index(std::string_view label) const {
  auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) {
    throw std::out_of_range("unknown state '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - states.begin());
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::vector<const CheckResult*> ValidationReport::failures() const {
  std::vector<const CheckResult*> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(&c);
  }
  return out;
}

const CheckResult* ValidationReport::find(std::string_view id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

void ValidationReport::append(const ValidationReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

namespace {

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object() || !node.contains(key)) {
    throw ParseError(join_path(path, key) + ": missing field");
  }
  return node.at(key);
}

double as_real(const json& node, const std::string& path) {
  if (!node.is_number()) throw ParseError(path + ": expected a number");
  double v = node.get<double>();
  if (!std::isfinite(v)) throw ParseError(path + ": value is not finite");
  return v;
}

std::vector<double> as_reals(const json& node, const std::string& path) {
  if (!node.is_array()) throw ParseError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(as_real(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::string> as_labels(const json& node, const std::string& path) {
  if (!node.is_array()) throw ParseError(path + ": expected an array of labels");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_string()) {
      throw ParseError(path + "[" + std::to_string(i) + "]: expected a string");
    }
    auto label = node[i].get<std::string>();
    if (!seen.insert(label).second) {
      throw ParseError(path + ": duplicate label '" + label + "'");
    }
    out.push_back(std::move(label));
  }
  return out;
}

// Reads a map state-label -> real covering every state exactly once.
std::vector<double> as_state_map(const json& node, const GameModel& model,
                                 const std::string& path) {
  if (!node.is_object()) throw ParseError(path + ": expected a map from state labels");
  std::vector<double> out(model.state_count(), 0.0);
  std::vector<bool> seen(model.state_count(), false);
  for (const auto& [label, value] : node.items()) {
    std::size_t x = 0;
    try {
      x = model.state_index(label);
    } catch (const std::out_of_range&) {
      throw ParseError(path + ": unknown state '" + label + "'");
    }
    out[x] = as_real(value, path + "." + label);
    seen[x] = true;
  }
  for (std::size_t x = 0; x < seen.size(); ++x) {
    if (!seen[x]) throw ParseError(path + ": missing state '" + model.states[x] + "'");
  }
  return out;
}

StateDynamics parse_state_dynamics(const json& node, std::size_t n,
                                   const std::string& path) {
  StateDynamics d;
  d.actions_max = as_labels(require(node, "actions_max", path), path + ".actions_max");
  d.actions_min = as_labels(require(node, "actions_min", path), path + ".actions_min");
  if (d.actions_max.empty()) throw ParseError(path + ".actions_max: empty action list");
  if (d.actions_min.empty()) throw ParseError(path + ".actions_min: empty action list");

  const json& q = require(node, "q", path);
  const json& r = require(node, "r", path);
  const std::size_t p = d.max_count();
  const std::size_t m = d.min_count();
  if (!q.is_array() || q.size() != p) {
    throw ParseError(path + ".q: expected " + std::to_string(p) + " rows (one per maximizer action)");
  }
  if (!r.is_array() || r.size() != p) {
    throw ParseError(path + ".r: expected " + std::to_string(p) + " rows (one per maximizer action)");
  }
  d.rates.resize(p);
  d.reward.resize(p);
  for (std::size_t a = 0; a < p; ++a) {
    const std::string qa = path + ".q[" + std::to_string(a) + "]";
    const std::string ra = path + ".r[" + std::to_string(a) + "]";
    if (!q[a].is_array() || q[a].size() != m) {
      throw ParseError(qa + ": expected " + std::to_string(m) + " entries (one per minimizer action)");
    }
    d.reward[a] = as_reals(r[a], ra);
    if (d.reward[a].size() != m) {
      throw ParseError(ra + ": expected " + std::to_string(m) + " entries (one per minimizer action)");
    }
    for (std::size_t b = 0; b < m; ++b) {
      const std::string qab = qa + "[" + std::to_string(b) + "]";
      auto row = as_reals(q[a][b], qab);
      if (row.size() != n) {
        throw ParseError(qab + ": rate vector has " + std::to_string(row.size()) +
                         " entries, expected " + std::to_string(n));
      }
      d.rates[a].push_back(std::move(row));
    }
  }
  return d;
}

json state_map_json(const GameModel& model, const std::vector<double>& values) {
  json out = json::object();
  for (std::size_t x = 0; x < model.state_count(); ++x) out[model.states[x]] = values[x];
  return out;
}

std::string describe(const GameModel& model, std::size_t k, std::size_t x,
                     std::size_t a, std::size_t b) {
  const auto& d = model.at(k, x);
  std::ostringstream os;
  os << "(k=" << k << ",x=" << model.states[x] << ",a=" << d.actions_max[a]
     << ",b=" << d.actions_min[b] << ")";
  return os.str();
}

std::string describe_state(const GameModel& model, std::size_t x) {
  return "(x=" + model.states[x] + ")";
}

CheckResult make_check(std::string id) {
  CheckResult c;
  c.id = std::move(id);
  return c;
}

void record(CheckResult& check, double violation, std::string where) {
  check.passed = false;
  check.worst_violation = std::max(check.worst_violation, violation);
  check.offending.push_back(std::move(where));
}

}  // namespace

GameModel parse_model(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("model: expected a top-level object");

  GameModel model;
  const double horizon = as_real(require(root, "horizon", ""), "horizon");
  if (!(horizon > 0.0)) throw ParseError("horizon: must be positive");

  if (root.contains("cells")) {
    auto bounds = as_reals(root.at("cells"), "cells");
    if (bounds.size() < 2) throw ParseError("cells: need at least two boundaries");
    if (bounds.front() != 0.0) throw ParseError("cells: first boundary must be 0");
    if (std::abs(bounds.back() - horizon) > 1e-12 * std::max(1.0, horizon)) {
      throw ParseError("cells: last boundary must equal the horizon");
    }
    bounds.back() = horizon;
    try {
      model.partition = TimePartition(std::move(bounds));
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("cells: ") + e.what());
    }
  } else {
    model.partition = TimePartition::single_cell(horizon);
  }

  model.states = as_labels(require(root, "states", ""), "states");
  if (model.states.empty()) throw ParseError("states: at least one state is required");
  const std::size_t n = model.state_count();

  const json& dyn = require(root, "dynamics", "");
  if (!dyn.is_array() || dyn.size() != model.cell_count()) {
    throw ParseError("dynamics: expected " + std::to_string(model.cell_count()) +
                     " entries (one per time cell)");
  }
  model.dynamics.resize(model.cell_count());
  for (std::size_t k = 0; k < model.cell_count(); ++k) {
    const std::string path = "dynamics[" + std::to_string(k) + "]";
    if (!dyn[k].is_object()) throw ParseError(path + ": expected a map from state labels");
    model.dynamics[k].resize(n);
    std::vector<bool> seen(n, false);
    for (const auto& [label, node] : dyn[k].items()) {
      std::size_t x = 0;
      try {
        x = model.state_index(label);
      } catch (const std::out_of_range&) {
        throw ParseError(path + ": unknown state '" + label + "'");
      }
      model.dynamics[k][x] = parse_state_dynamics(node, n, path + "." + label);
      seen[x] = true;
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (!seen[x]) throw ParseError(path + ": missing state '" + model.states[x] + "'");
    }
  }

  model.terminal = as_state_map(require(root, "terminal", ""), model, "terminal");

  if (root.contains("m")) {
    model.uniformization = as_state_map(root.at("m"), model, "m");
  } else {
    model.uniformization.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
      model.uniformization[x] = std::max(model.exit_rate(x), kMinUniformizationRate);
    }
  }

  if (root.contains("certificate")) {
    const json& c = root.at("certificate");
    DriftCertificate cert;
    cert.w0 = as_state_map(require(c, "w0", "certificate"), model, "certificate.w0");
    cert.w1 = as_state_map(require(c, "w1", "certificate"), model, "certificate.w1");
    cert.c0 = as_real(require(c, "c0", "certificate"), "certificate.c0");
    cert.c1 = as_real(require(c, "c1", "certificate"), "certificate.c1");
    cert.M0 = as_real(require(c, "M0", "certificate"), "certificate.M0");
    cert.M1 = as_real(require(c, "M1", "certificate"), "certificate.M1");
    model.certificate = std::move(cert);
  }
  return model;
}

std::string serialize_model(const GameModel& model) {
  json root;
  root["horizon"] = model.horizon();
  root["cells"] = std::vector<double>(model.partition.boundaries().begin(),
                                      model.partition.boundaries().end());
  root["states"] = model.states;
  json dyn = json::array();
  for (const auto& cell : model.dynamics) {
    json entry = json::object();
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      const auto& d = cell[x];
      entry[model.states[x]] = {{"actions_max", d.actions_max},
                                {"actions_min", d.actions_min},
                                {"q", d.rates},
                                {"r", d.reward}};
    }
    dyn.push_back(std::move(entry));
  }
  root["dynamics"] = std::move(dyn);
  root["terminal"] = state_map_json(model, model.terminal);
  root["m"] = state_map_json(model, model.uniformization);
  if (model.certificate) {
    const auto& c = *model.certificate;
    root["certificate"] = {{"w0", state_map_json(model, c.w0)},
                           {"w1", state_map_json(model, c.w1)},
                           {"c0", c.c0},
                           {"c1", c.c1},
                           {"M0", c.M0},
                           {"M1", c.M1}};
  }
  return root.dump(2) + "\n";
}

ValidationReport validate_model(const GameModel& model, const ValidationOptions& options) {
  CheckResult conservative = make_check("conservativeness");
  CheckResult nonneg = make_check("offdiagonal_nonnegative");
  CheckResult dims = make_check("dimensions");
  CheckResult actions = make_check("actions_nonempty");
  CheckResult rate = make_check("uniformization_rate");

  const std::size_t n = model.state_count();
  if (model.dynamics.size() != model.cell_count()) {
    record(dims, 1.0, "dynamics cell count");
  }
  if (model.terminal.size() != n) record(dims, 1.0, "terminal");
  if (model.uniformization.size() != n) record(dims, 1.0, "m");

  for (std::size_t k = 0; k < model.dynamics.size(); ++k) {
    if (model.dynamics[k].size() != n) {
      record(dims, 1.0, "dynamics[" + std::to_string(k) + "]");
      continue;
    }
    for (std::size_t x = 0; x < n; ++x) {
      const auto& d = model.at(k, x);
      if (d.actions_max.empty() || d.actions_min.empty()) {
        record(actions, 1.0, "(k=" + std::to_string(k) + ",x=" + model.states[x] + ")");
        continue;
      }
      if (d.rates.size() != d.max_count() || d.reward.size() != d.max_count()) {
        record(dims, 1.0, "(k=" + std::to_string(k) + ",x=" + model.states[x] + ")");
        continue;
      }
      for (std::size_t a = 0; a < d.max_count(); ++a) {
        if (d.rates[a].size() != d.min_count() || d.reward[a].size() != d.min_count()) {
          record(dims, 1.0, "(k=" + std::to_string(k) + ",x=" + model.states[x] + ")");
          continue;
        }
        for (std::size_t b = 0; b < d.min_count(); ++b) {
          const auto& q = d.rates[a][b];
          if (q.size() != n) {
            record(dims, 1.0, describe(model, k, x, a, b));
            continue;
          }
          double sum = 0.0;
          for (std::size_t y = 0; y < n; ++y) {
            sum += q[y];
            if (y != x && q[y] < 0.0) {
              record(nonneg, -q[y], describe(model, k, x, a, b) + "[y=" + model.states[y] + "]");
            }
          }
          if (std::abs(sum) > options.row_tolerance) {
            record(conservative, std::abs(sum), describe(model, k, x, a, b));
          }
        }
      }
    }
  }

  if (dims.passed && model.uniformization.size() == n) {
    for (std::size_t x = 0; x < n; ++x) {
      const double m = model.uniformization[x];
      const double qx = model.exit_rate(x);
      if (!(m > 0.0)) {
        record(rate, qx - m > 0.0 ? qx - m : -m, describe_state(model, x));
      } else if (qx > m) {
        record(rate, qx - m, describe_state(model, x));
      }
    }
  }

  ValidationReport report;
  report.checks = {dims, actions, conservative, nonneg, rate};
  return report;
}

DriftCertificate auto_certificate(const GameModel& model) {
  DriftCertificate cert;
  const std::size_t n = model.state_count();
  cert.w0.assign(n, 1.0);
  cert.w1.assign(n, 1.0);
  double max_reward = 0.0;
  for (const auto& cell : model.dynamics) {
    for (const auto& d : cell) {
      for (const auto& row : d.reward) {
        for (double r : row) max_reward = std::max(max_reward, std::abs(r));
      }
    }
  }
  double max_terminal = 0.0;
  for (double g : model.terminal) max_terminal = std::max(max_terminal, std::abs(g));
  double max_exit = 0.0;
  for (std::size_t x = 0; x < n; ++x) max_exit = std::max(max_exit, model.exit_rate(x));

  cert.c0 = 1.0;
  cert.c1 = 1.0;
  cert.M0 = std::max({1.0, max_reward, max_terminal, max_exit});
  cert.M1 = std::max(1.0, max_exit);
  return cert;
}

ValidationReport validate_certificate(const GameModel& model, const DriftCertificate& cert,
                                      const ValidationOptions& options) {
  const std::size_t n = model.state_count();
  const double tol = options.certificate_tolerance;

  CheckResult shape = make_check("certificate.shape");
  CheckResult constants = make_check("certificate.constants_positive");
  CheckResult weights = make_check("certificate.weights_at_least_one");
  CheckResult drift0 = make_check("condition.a.w0_drift");
  CheckResult exit0 = make_check("condition.b.exit_rate_bound");
  CheckResult reward = make_check("condition.c.reward_bound");
  CheckResult terminal = make_check("condition.c.terminal_bound");
  CheckResult drift1 = make_check("condition.d.w1_drift");
  CheckResult exit1 = make_check("condition.e.weighted_exit_rate_bound");

  ValidationReport report;
  if (cert.w0.size() != n || cert.w1.size() != n) {
    record(shape, 1.0, "weight vectors must have one entry per state");
    report.checks = {shape};
    return report;
  }
  for (auto [name, value] : {std::pair{"c0", cert.c0}, std::pair{"c1", cert.c1},
                             std::pair{"M0", cert.M0}, std::pair{"M1", cert.M1}}) {
    if (!(value > 0.0)) record(constants, -value, name);
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (cert.w0[x] < 1.0) record(weights, 1.0 - cert.w0[x], "w0" + describe_state(model, x));
    if (cert.w1[x] < 1.0) record(weights, 1.0 - cert.w1[x], "w1" + describe_state(model, x));
  }

  for (std::size_t k = 0; k < model.cell_count(); ++k) {
    for (std::size_t x = 0; x < n; ++x) {
      const auto& d = model.at(k, x);
      for (std::size_t a = 0; a < d.max_count(); ++a) {
        for (std::size_t b = 0; b < d.min_count(); ++b) {
          const auto& q = d.rates[a][b];
          double int0 = 0.0;
          double int1 = 0.0;
          for (std::size_t y = 0; y < n; ++y) {
            int0 += cert.w0[y] * q[y];
            int1 += cert.w1[y] * q[y];
          }
          const double v0 = int0 - cert.c0 * cert.w0[x];
          if (v0 > tol) record(drift0, v0, describe(model, k, x, a, b));
          const double v1 = int1 - cert.c1 * cert.w1[x];
          if (v1 > tol) record(drift1, v1, describe(model, k, x, a, b));
          const double vr = std::abs(d.reward[a][b]) - cert.M0 * cert.w0[x];
          if (vr > tol) record(reward, vr, describe(model, k, x, a, b));
        }
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    const double qx = model.exit_rate(x);
    const double vb = qx - cert.M0 * cert.w0[x];
    if (vb > tol) record(exit0, vb, describe_state(model, x));
    const double vg = std::abs(model.terminal[x]) - cert.M0 * cert.w0[x];
    if (vg > tol) record(terminal, vg, describe_state(model, x));
    const double ve = cert.w0[x] * qx - cert.M1 * cert.w1[x];
    if (ve > tol) record(exit1, ve, describe_state(model, x));
  }

  report.checks = {shape, constants, weights, drift0, exit0, reward, terminal, drift1, exit1};
  return report;
}

std::vector<double> uniformized_kernel(const GameModel& model, std::size_t cell,
                                       std::size_t x, std::size_t a, std::size_t b) {
  const double m = model.uniformization.at(x);
  if (!(m > 0.0)) {
    throw std::domain_error("uniformization rate of state '" + model.states.at(x) +
                            "' is not positive");
  }
  const auto& q = model.at(cell, x).rates.at(a).at(b);
  std::vector<double> p(q.size());
  for (std::size_t y = 0; y < q.size(); ++y) p[y] = q[y] / m;
  p[x] += 1.0;
  return p;
}

}  // namespace jumpgame
