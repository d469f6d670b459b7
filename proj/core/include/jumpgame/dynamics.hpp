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
#include <span>
#include <vector>

#include "jumpgame/model.hpp"
#include "jumpgame/solver.hpp"

namespace jumpgame {

// Payoff of the policy pair from every initial state and time on the grid:
// backward RK4 for v' + rbar + Qbar v = 0, v(T) = g, where rbar and Qbar are
// the policy-averaged reward and rates on each grid interval.
ValueGrid evaluate_payoff_grid(const GameModel& model, const MarkovPolicy& pi,
                               const MarkovPolicy& psi, std::span<const double> grid);

// v(0, .) of evaluate_payoff_grid.
std::vector<double> evaluate_payoff(const GameModel& model, const MarkovPolicy& pi,
                                    const MarkovPolicy& psi, std::span<const double> grid);

struct BestResponse {
  std::vector<double> values;  // v(0, .)
  MarkovPolicy policy;         // deterministic, one action per interval and state
};

// Optimal single-controller response of `side` against the fixed opponent
// policy `fixed`. Pure actions suffice, so the backward equation takes a max
// (or min) over the responder's actions.
BestResponse best_response(const GameModel& model, const MarkovPolicy& fixed, Side side,
                           std::span<const double> grid);

struct Trajectory {
  std::vector<double> jump_times;   // strictly increasing, all <= T
  std::vector<std::size_t> states;  // x_0, x_1, ...; one more than jump_times
  double running_reward = 0.0;
  double terminal_reward = 0.0;

  std::size_t terminal_state() const { return states.back(); }
  double payoff() const { return running_reward + terminal_reward; }
  // State occupied at time t (right-continuous).
  std::size_t state_at(double t) const;
};

struct PayoffEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

// Seed of path `index` in a run seeded with `seed`.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

// Thinning sampler for the jump process driven by a pair of Markov policies.
// Proposals arrive at rate m(x); at a proposal the players draw actions from
// their strategies, the jump is accepted with probability q_x(a,b)/m(x) and
// the target is drawn from the off-diagonal rates. Rewards are accumulated
// exactly with the policy-averaged rate along each holding interval.
class PathSampler {
 public:
  PathSampler(const GameModel& model, const MarkovPolicy& pi, const MarkovPolicy& psi);

  Trajectory sample(std::size_t x0, std::uint64_t seed) const;

  std::span<const double> times() const { return times_; }

 private:
  // Integral of the averaged reward rate of state x over [0, t].
  double cumulative_reward(std::size_t x, double t) const;
  std::size_t interval_of(double t) const;

  const GameModel* model_;
  const MarkovPolicy* pi_;
  const MarkovPolicy* psi_;
  std::vector<double> times_;
  std::vector<std::size_t> cells_;
  std::vector<double> rate_;        // [i * n + x] averaged reward rate
  std::vector<double> cumulative_;  // [i * n + x] integral over [0, t_i]
};

Trajectory simulate_path(const GameModel& model, const MarkovPolicy& pi,
                         const MarkovPolicy& psi, std::size_t x0, std::uint64_t seed);

// Sample mean of `paths` independent payoffs; path k uses path_seed(seed, k),
// so the result does not depend on `threads`.
PayoffEstimate monte_carlo(const GameModel& model, const MarkovPolicy& pi,
                           const MarkovPolicy& psi, std::size_t x0, std::size_t paths,
                           std::uint64_t seed, unsigned threads = 0);

struct DriftCheckReport {
  std::size_t x0 = 0;
  double time = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  // Mean of w0(xi_t) against e^{c0 t} w0(x0).
  double estimate = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound + 4 SE - estimate
  bool drift_passed = false;
  // Largest number of jumps on any sampled path over [0, T].
  std::size_t max_jumps = 0;
  // Mean payoff against (T + 1) M0 e^{c0 T} w0(x0).
  double payoff_mean = 0.0;
  double payoff_standard_error = 0.0;
  double payoff_bound = 0.0;
  bool payoff_passed = false;

  bool passed() const { return drift_passed && payoff_passed; }
};

DriftCheckReport empirical_drift_check(const GameModel& model, const DriftCertificate& cert,
                                       const MarkovPolicy& pi, const MarkovPolicy& psi,
                                       std::size_t x0, double t, std::size_t paths,
                                       std::uint64_t seed, unsigned threads = 0);

}  // namespace jumpgame
