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

#include "jumpgame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"

namespace jumpgame {

const char* to_string(Side side) {
  return side == Side::maximizer ? "maximizer" : "minimizer";
}

std::vector<double> make_time_grid(const TimePartition& partition, std::size_t intervals) {
  const std::size_t cells = partition.cell_count();
  if (intervals < cells) {
    throw std::invalid_argument("time grid needs at least one interval per cell (" +
                                std::to_string(cells) + " cells, " +
                                std::to_string(intervals) + " intervals)");
  }
  const double T = partition.horizon();

  // Largest-remainder apportionment with a floor of one step per cell.
  std::vector<std::size_t> steps(cells, 1);
  std::vector<double> remainder(cells, 0.0);
  std::size_t assigned = cells;
  const std::size_t spare = intervals - cells;
  for (std::size_t k = 0; k < cells; ++k) {
    const double share = static_cast<double>(spare) *
                         (partition.cell_end(k) - partition.cell_begin(k)) / T;
    const auto whole = static_cast<std::size_t>(std::floor(share));
    steps[k] += whole;
    assigned += whole;
    remainder[k] = share - static_cast<double>(whole);
  }
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < intervals; ++r, ++assigned) ++steps[order[r % cells]];

  std::vector<double> grid;
  grid.reserve(intervals + 1);
  for (std::size_t k = 0; k < cells; ++k) {
    const double begin = partition.cell_begin(k);
    const double width = partition.cell_end(k) - begin;
    for (std::size_t j = 0; j < steps[k]; ++j) {
      grid.push_back(begin + width * static_cast<double>(j) / static_cast<double>(steps[k]));
    }
  }
  grid.push_back(T);
  return grid;
}

void check_time_grid(const TimePartition& partition, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("time grid needs at least two points");
  if (grid.front() != 0.0 || grid.back() != partition.horizon()) {
    throw std::invalid_argument("time grid must run from 0 to the horizon");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
  for (double b : partition.boundaries()) {
    if (!std::binary_search(grid.begin(), grid.end(), b)) {
      throw std::invalid_argument("time grid is missing cell boundary " + std::to_string(b));
    }
  }
}

std::vector<std::size_t> interval_cells(const TimePartition& partition,
                                        std::span<const double> grid) {
  std::vector<std::size_t> cells(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) cells[i] = partition.cell_of(grid[i]);
  return cells;
}

ValueGrid::ValueGrid(std::vector<double> times, std::size_t states, double fill)
    : times_(std::move(times)), states_(states), values_(times_.size() * states, fill) {}

std::vector<double> ValueGrid::at(double t) const {
  if (times_.empty() || t < times_.front() || t > times_.back()) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the value grid");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  std::vector<double> out(slice(lo).begin(), slice(lo).end());
  if (times_[lo] == t || hi == times_.size()) return out;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  for (std::size_t x = 0; x < states_; ++x) out[x] += w * ((*this)(hi, x) - out[x]);
  return out;
}

double sup_distance(const ValueGrid& a, const ValueGrid& b) {
  if (a.times_ != b.times_ || a.states_ != b.states_) {
    throw std::invalid_argument("value grids are not comparable");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < a.values_.size(); ++k) {
    d = std::max(d, std::abs(a.values_[k] - b.values_[k]));
  }
  return d;
}

void check_policy(const GameModel& model, const MarkovPolicy& policy,
                  std::span<const double> grid) {
  if (!std::equal(policy.times.begin(), policy.times.end(), grid.begin(), grid.end())) {
    throw std::invalid_argument(std::string(to_string(policy.side)) +
                                " policy grid does not match the evaluation grid");
  }
  if (policy.strategy.size() + 1 != grid.size()) {
    throw std::invalid_argument("policy must hold one strategy per grid interval");
  }
  const auto cells = interval_cells(model.partition, grid);
  for (std::size_t i = 0; i < policy.strategy.size(); ++i) {
    if (policy.strategy[i].size() != model.state_count()) {
      throw std::invalid_argument("policy interval " + std::to_string(i) +
                                  " does not cover every state");
    }
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      const auto& d = model.at(cells[i], x);
      const std::size_t count = policy.side == Side::maximizer ? d.max_count() : d.min_count();
      const auto& s = policy.strategy[i][x];
      if (s.size() != count) {
        throw std::invalid_argument("policy strategy at interval " + std::to_string(i) +
                                    ", state '" + model.states[x] +
                                    "' does not match the admissible action list");
      }
      double sum = 0.0;
      for (double v : s) {
        if (!(v >= -1e-12)) {
          throw std::invalid_argument("policy has a negative probability at interval " +
                                      std::to_string(i));
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("policy strategy at interval " + std::to_string(i) +
                                    ", state '" + model.states[x] + "' does not sum to one");
      }
    }
  }
}

double SolveDiagnostics::max_monotonicity_violation() const {
  double v = 0.0;
  for (double d : monotonicity_violations) v = std::max(v, d);
  return v;
}

double SolveDiagnostics::max_envelope_violation() const {
  double v = 0.0;
  for (double d : envelope_violations) v = std::max(v, d);
  return v;
}

double SolveDiagnostics::observed_contraction(double floor) const {
  double ratio = 0.0;
  for (std::size_t n = 1; n < deltas.size(); ++n) {
    if (deltas[n - 1] > floor && deltas[n] > floor) {
      ratio = std::max(ratio, deltas[n] / deltas[n - 1]);
    }
  }
  return ratio;
}

NonConvergenceError::NonConvergenceError(ValueGrid last, SolveDiagnostics diagnostics)
    : std::runtime_error("value iteration did not converge within " +
                         std::to_string(diagnostics.iterations) + " iterations"),
      last_(std::move(last)),
      diagnostics_(std::move(diagnostics)) {}

ValueGrid seed_u0(const GameModel& model, const DriftCertificate& cert,
                  std::span<const double> grid) {
  const double T = model.horizon();
  ValueGrid u(std::vector<double>(grid.begin(), grid.end()), model.state_count());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // (M0/c0)(c0 e + e - 1) rewritten as M0 (e + (e - 1)/c0).
    const double growth = std::expm1(cert.c0 * (T - grid[i]));
    const double factor = cert.M0 * ((1.0 + growth) + growth / cert.c0);
    for (std::size_t x = 0; x < model.state_count(); ++x) u(i, x) = factor * cert.w0[x];
  }
  return u;
}

Matrix stage_matrix(const GameModel& model, std::size_t cell, std::span<const double> u,
                    std::size_t x, StageForm form) {
  const auto& d = model.at(cell, x);
  const std::size_t n = model.state_count();
  Matrix M(d.max_count(), d.min_count());
  const double m = model.uniformization[x];
  for (std::size_t a = 0; a < d.max_count(); ++a) {
    for (std::size_t b = 0; b < d.min_count(); ++b) {
      const auto& q = d.rates[a][b];
      double s = 0.0;
      if (form == StageForm::generator) {
        for (std::size_t y = 0; y < n; ++y) s += u[y] * q[y];
        M(a, b) = d.reward[a][b] + s;
      } else {
        for (std::size_t y = 0; y < n; ++y) {
          const double p = (y == x) ? 1.0 + q[y] / m : q[y] / m;
          s += u[y] * p;
        }
        M(a, b) = d.reward[a][b] + m * s;
      }
    }
  }
  return M;
}

Matrix stage_matrix(const GameModel& model, const ValueGrid& u, double t, std::size_t x,
                    StageForm form) {
  if (!(t >= 0.0) || t > model.horizon()) {
    throw std::out_of_range("stage time " + std::to_string(t) + " outside [0, T]");
  }
  const auto slice = u.at(t);
  return stage_matrix(model, model.partition.cell_of(t), slice, x, form);
}

namespace {

double stage_value(const GameModel& model, std::size_t cell, std::span<const double> u,
                   std::size_t x, StageForm form, double tol) {
  return solve_matrix_game(stage_matrix(model, cell, u, x, form), tol).value;
}

}  // namespace

ValueGrid apply_G(const GameModel& model, const ValueGrid& u, const SolverOptions& options) {
  const auto& t = u.times();
  const std::size_t N = t.size() - 1;
  const double T = model.horizon();
  const auto cells = interval_cells(model.partition, t);
  ValueGrid out(t, model.state_count());

  detail::parallel_for(model.state_count(), options.threads, [&](std::size_t x) {
    const double m = model.uniformization[x];
    const double g = model.terminal[x];
    out(N, x) = g;
    // I_i = trapezoid over [t_i, T] of e^{-m s} val(t_i + s), built backwards
    // through I_i = h/2 (v_i + e^{-mh} v_{i+1}) + e^{-mh} I_{i+1}.
    double integral = 0.0;
    double next_left = 0.0;
    std::size_t next_cell = model.cell_count();
    for (std::size_t i = N; i-- > 0;) {
      const std::size_t c = cells[i];
      const double right = (next_cell == c)
                               ? next_left
                               : stage_value(model, c, u.slice(i + 1), x,
                                             StageForm::uniformized, options.matrix_tol);
      const double left =
          stage_value(model, c, u.slice(i), x, StageForm::uniformized, options.matrix_tol);
      const double h = t[i + 1] - t[i];
      const double decay = std::exp(-m * h);
      integral = 0.5 * h * (left + decay * right) + decay * integral;
      out(i, x) = std::exp(-m * (T - t[i])) * g + integral;
      next_left = left;
      next_cell = c;
    }
  });
  return out;
}

IterationResult value_iterate(const GameModel& model, const DriftCertificate& cert,
                              std::span<const double> grid, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("iteration tolerance must be positive");
  check_time_grid(model.partition, grid);

  const ValueGrid envelope = seed_u0(model, cert, grid);
  ValueGrid u = envelope;
  SolveDiagnostics diag;
  const std::size_t n = model.state_count();

  while (diag.iterations < options.max_iter) {
    ValueGrid next = apply_G(model, u, options);
    ++diag.iterations;
    double delta = 0.0;
    double rise = 0.0;
    double outside = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t x = 0; x < n; ++x) {
        const double step = next(i, x) - u(i, x);
        delta = std::max(delta, std::abs(step));
        rise = std::max(rise, step);
        outside = std::max(outside, std::abs(next(i, x)) - envelope(i, x));
      }
    }
    diag.deltas.push_back(delta);
    diag.monotonicity_violations.push_back(rise);
    diag.envelope_violations.push_back(outside);
    u = std::move(next);
    if (delta <= options.tol) {
      diag.fixed_point_residual = sup_distance(apply_G(model, u, options), u);
      return {std::move(u), std::move(diag)};
    }
  }
  throw NonConvergenceError(std::move(u), std::move(diag));
}

ValueGrid isaacs_backward(const GameModel& model, std::span<const double> grid,
                          const SolverOptions& options) {
  check_time_grid(model.partition, grid);
  const std::size_t n = model.state_count();
  const std::size_t N = grid.size() - 1;
  const auto cells = interval_cells(model.partition, grid);

  ValueGrid u(std::vector<double>(grid.begin(), grid.end()), n);
  for (std::size_t x = 0; x < n; ++x) u(N, x) = model.terminal[x];

  // Backward in time u(t - h) = u(t) + integral of val(...), so the
  // right-hand side below is +val.
  auto rhs = [&](std::size_t cell, std::span<const double> v, std::vector<double>& out) {
    detail::parallel_for(n, options.threads, [&](std::size_t x) {
      out[x] = stage_value(model, cell, v, x, StageForm::generator, options.matrix_tol);
    });
  };

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = N; i-- > 0;) {
    const std::size_t c = cells[i];
    const double h = grid[i + 1] - grid[i];
    const auto v = u.slice(i + 1);
    rhs(c, v, k1);
    for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + 0.5 * h * k1[x];
    rhs(c, tmp, k2);
    for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + 0.5 * h * k2[x];
    rhs(c, tmp, k3);
    for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + h * k3[x];
    rhs(c, tmp, k4);
    for (std::size_t x = 0; x < n; ++x) {
      u(i, x) = v[x] + h / 6.0 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
    }
  }
  return u;
}

PolicyPair extract_policies(const GameModel& model, const ValueGrid& u,
                            const SolverOptions& options) {
  const auto& t = u.times();
  check_time_grid(model.partition, t);
  const std::size_t n = model.state_count();
  const std::size_t N = t.size() - 1;
  const auto cells = interval_cells(model.partition, t);

  PolicyPair out;
  out.maximizer.side = Side::maximizer;
  out.minimizer.side = Side::minimizer;
  out.maximizer.times = t;
  out.minimizer.times = t;
  out.maximizer.strategy.assign(N, std::vector<std::vector<double>>(n));
  out.minimizer.strategy.assign(N, std::vector<std::vector<double>>(n));

  detail::parallel_for(N * n, options.threads, [&](std::size_t k) {
    const std::size_t i = k / n;
    const std::size_t x = k % n;
    auto sol = solve_matrix_game(stage_matrix(model, cells[i], u.slice(i), x, StageForm::generator),
                                 options.matrix_tol);
    out.maximizer.strategy[i][x] = std::move(sol.lambda);
    out.minimizer.strategy[i][x] = std::move(sol.mu);
  });
  return out;
}

}  // namespace jumpgame
