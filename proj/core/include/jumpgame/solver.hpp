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
#include <span>
#include <stdexcept>
#include <vector>

#include "jumpgame/matrix_game.hpp"
#include "jumpgame/model.hpp"

namespace jumpgame {

enum class Side { maximizer, minimizer };
enum class StageForm { uniformized, generator };

const char* to_string(Side side);

// Uniform grid of `intervals` steps spread over the cells of `partition` in
// proportion to their length (at least one step per cell). Every cell
// boundary is a grid point.
std::vector<double> make_time_grid(const TimePartition& partition, std::size_t intervals);

// Throws std::invalid_argument unless `grid` is strictly increasing, runs
// from 0 to T and contains every cell boundary.
void check_time_grid(const TimePartition& partition, std::span<const double> grid);

// Cell index of each grid interval [t_i, t_{i+1}).
std::vector<std::size_t> interval_cells(const TimePartition& partition,
                                        std::span<const double> grid);

// Value function sampled on a time grid, linear in t between grid points.
class ValueGrid {
 public:
  ValueGrid() = default;
  ValueGrid(std::vector<double> times, std::size_t states, double fill = 0.0);

  std::size_t size() const { return times_.size(); }
  std::size_t state_count() const { return states_; }
  const std::vector<double>& times() const { return times_; }

  std::span<double> slice(std::size_t i) { return {values_.data() + i * states_, states_}; }
  std::span<const double> slice(std::size_t i) const {
    return {values_.data() + i * states_, states_};
  }
  double& operator()(std::size_t i, std::size_t x) { return values_[i * states_ + x]; }
  double operator()(std::size_t i, std::size_t x) const { return values_[i * states_ + x]; }

  // Linear interpolation in t; throws std::out_of_range outside the grid.
  std::vector<double> at(double t) const;

  // Largest |a - b| over all grid points and states. Grids must match.
  friend double sup_distance(const ValueGrid& a, const ValueGrid& b);

  bool operator==(const ValueGrid&) const = default;

 private:
  std::vector<double> times_;
  std::size_t states_ = 0;
  std::vector<double> values_;
};

// Mixed strategies of one player, constant on each grid interval
// [t_i, t_{i+1}). strategy[i][x] is a distribution over the player's action
// list on the cell containing t_i.
struct MarkovPolicy {
  Side side = Side::maximizer;
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> strategy;

  std::size_t interval_count() const { return strategy.size(); }
  std::span<const double> at(std::size_t i, std::size_t x) const { return strategy[i][x]; }
};

// Throws std::invalid_argument if `policy` is not a valid Markov policy of
// its side for `model` on `grid`.
void check_policy(const GameModel& model, const MarkovPolicy& policy,
                  std::span<const double> grid);

struct SolveDiagnostics {
  std::size_t iterations = 0;
  std::vector<double> deltas;                   // sup |u_{n+1} - u_n|
  std::vector<double> monotonicity_violations;  // max (u_{n+1} - u_n)_+
  std::vector<double> envelope_violations;      // max (|u_{n+1}| - u_0)_+
  double fixed_point_residual = 0.0;            // sup |G[u] - u| at exit

  double max_monotonicity_violation() const;
  double max_envelope_violation() const;
  // Largest ratio delta_{n+1} / delta_n over iterations with delta_n above
  // `floor`; zero when fewer than two such deltas exist.
  double observed_contraction(double floor = 1e-12) const;
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  double matrix_tol = kDefaultMatrixTolerance;
  // Worker threads for per-state work; 0 picks the hardware concurrency.
  // Results do not depend on this value.
  unsigned threads = 0;
};

struct IterationResult {
  ValueGrid values;
  SolveDiagnostics diagnostics;
};

// Raised by value_iterate when max_iter is exhausted; carries the last
// iterate and the diagnostics gathered so far.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(ValueGrid last, SolveDiagnostics diagnostics);

  const ValueGrid& last_iterate() const { return last_; }
  const SolveDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  ValueGrid last_;
  SolveDiagnostics diagnostics_;
};

// Closed-form upper envelope (M0/c0)(c0 e^{c0(T-t)} + e^{c0(T-t)} - 1) w0(x)
// used to start value iteration.
ValueGrid seed_u0(const GameModel& model, const DriftCertificate& cert,
                  std::span<const double> grid);

// Stage payoff matrix at (t, x): rows are maximizer actions and columns
// minimizer actions of the cell containing t. Uniformized form:
// r + m(x) sum_y u(t,y) p(y); generator form: r + sum_y u(t,y) q(y).
Matrix stage_matrix(const GameModel& model, const ValueGrid& u, double t, std::size_t x,
                    StageForm form);

// Same matrix for an explicit value slice and cell.
Matrix stage_matrix(const GameModel& model, std::size_t cell, std::span<const double> u,
                    std::size_t x, StageForm form);

// One application of the uniformized fixed-point operator, integrated by the
// composite trapezoid rule over the grid. The integrand on each interval uses
// that interval's cell at both end points.
ValueGrid apply_G(const GameModel& model, const ValueGrid& u, const SolverOptions& options = {});

IterationResult value_iterate(const GameModel& model, const DriftCertificate& cert,
                              std::span<const double> grid, const SolverOptions& options = {});

// Backward RK4 integration of u' + val(generator stage game) = 0 from
// u(T) = g. Steps never cross a cell boundary.
ValueGrid isaacs_backward(const GameModel& model, std::span<const double> grid,
                          const SolverOptions& options = {});

struct PolicyPair {
  MarkovPolicy maximizer;
  MarkovPolicy minimizer;
};

// Saddle strategies of the generator-form stage game at the left end point
// of every grid interval.
PolicyPair extract_policies(const GameModel& model, const ValueGrid& u,
                            const SolverOptions& options = {});

}  // namespace jumpgame
