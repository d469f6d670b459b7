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

#include "jumpgame/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "parallel.hpp"

namespace jumpgame {

namespace {

// Policy-averaged reward rate and rate row of state x on interval i.
void averaged_row(const StateDynamics& d, std::span<const double> lambda,
                  std::span<const double> mu, double& reward, std::span<double> rates) {
  reward = 0.0;
  std::fill(rates.begin(), rates.end(), 0.0);
  for (std::size_t a = 0; a < d.max_count(); ++a) {
    if (lambda[a] == 0.0) continue;
    for (std::size_t b = 0; b < d.min_count(); ++b) {
      const double w = lambda[a] * mu[b];
      if (w == 0.0) continue;
      reward += w * d.reward[a][b];
      const auto& q = d.rates[a][b];
      for (std::size_t y = 0; y < rates.size(); ++y) rates[y] += w * q[y];
    }
  }
}

// One backward RK4 step of v' = -F(v): returns v(t - h) given v(t).
template <class Rhs>
void rk4_backward(std::span<const double> v, double h, std::span<double> out, Rhs&& rhs,
                  std::vector<double>& scratch) {
  const std::size_t n = v.size();
  scratch.resize(5 * n);
  std::span<double> k1(scratch.data(), n), k2(scratch.data() + n, n),
      k3(scratch.data() + 2 * n, n), k4(scratch.data() + 3 * n, n), tmp(scratch.data() + 4 * n, n);
  rhs(v, k1);
  for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + 0.5 * h * k1[x];
  rhs(tmp, k2);
  for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + 0.5 * h * k2[x];
  rhs(tmp, k3);
  for (std::size_t x = 0; x < n; ++x) tmp[x] = v[x] + h * k3[x];
  rhs(tmp, k4);
  for (std::size_t x = 0; x < n; ++x) {
    out[x] = v[x] + h / 6.0 * (k1[x] + 2.0 * k2[x] + 2.0 * k3[x] + k4[x]);
  }
}

// Fixed-order pairwise sum.
double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Mean and standard error, computed around the first sample so that a
// constant sample yields its value exactly and a zero error.
std::pair<double, double> mean_and_error(std::vector<double> samples) {
  const double n = static_cast<double>(samples.size());
  const double pivot = samples.front();
  for (double& s : samples) s -= pivot;
  const double offset = pairwise_sum(samples) / n;
  for (double& s : samples) s = (s - offset) * (s - offset);
  const double variance = pairwise_sum(samples) / (n - 1.0);
  return {pivot + offset, std::sqrt(variance / n)};
}

std::size_t draw(std::span<const double> probabilities, double u) {
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    acc += probabilities[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

}  // namespace

ValueGrid evaluate_payoff_grid(const GameModel& model, const MarkovPolicy& pi,
                               const MarkovPolicy& psi, std::span<const double> grid) {
  check_time_grid(model.partition, grid);
  if (pi.side != Side::maximizer || psi.side != Side::minimizer) {
    throw std::invalid_argument("evaluate_payoff expects (maximizer, minimizer) policies");
  }
  check_policy(model, pi, grid);
  check_policy(model, psi, grid);

  const std::size_t n = model.state_count();
  const std::size_t N = grid.size() - 1;
  const auto cells = interval_cells(model.partition, grid);
  ValueGrid v(std::vector<double>(grid.begin(), grid.end()), n);
  for (std::size_t x = 0; x < n; ++x) v(N, x) = model.terminal[x];

  std::vector<double> reward(n);
  std::vector<double> rates(n * n);
  std::vector<double> scratch;
  for (std::size_t i = N; i-- > 0;) {
    for (std::size_t x = 0; x < n; ++x) {
      averaged_row(model.at(cells[i], x), pi.at(i, x), psi.at(i, x), reward[x],
                   std::span<double>(rates.data() + x * n, n));
    }
    auto rhs = [&](std::span<const double> u, std::span<double> out) {
      for (std::size_t x = 0; x < n; ++x) {
        double s = reward[x];
        for (std::size_t y = 0; y < n; ++y) s += rates[x * n + y] * u[y];
        out[x] = s;
      }
    };
    rk4_backward(v.slice(i + 1), grid[i + 1] - grid[i], v.slice(i), rhs, scratch);
  }
  return v;
}

std::vector<double> evaluate_payoff(const GameModel& model, const MarkovPolicy& pi,
                                    const MarkovPolicy& psi, std::span<const double> grid) {
  const auto v = evaluate_payoff_grid(model, pi, psi, grid);
  return {v.slice(0).begin(), v.slice(0).end()};
}

BestResponse best_response(const GameModel& model, const MarkovPolicy& fixed, Side side,
                           std::span<const double> grid) {
  check_time_grid(model.partition, grid);
  if (fixed.side == side) {
    throw std::invalid_argument("best_response: the fixed policy must belong to the opponent");
  }
  check_policy(model, fixed, grid);

  const std::size_t n = model.state_count();
  const std::size_t N = grid.size() - 1;
  const bool maximize = side == Side::maximizer;
  const auto cells = interval_cells(model.partition, grid);

  std::vector<double> v(n), next(n);
  for (std::size_t x = 0; x < n; ++x) v[x] = model.terminal[x];

  BestResponse out;
  out.policy.side = side;
  out.policy.times.assign(grid.begin(), grid.end());
  out.policy.strategy.assign(N, std::vector<std::vector<double>>(n));

  // Responder action k of state x averaged over the opponent's strategy:
  // reward[x][k] and rate row rates[x][k][.].
  std::vector<std::vector<double>> reward(n);
  std::vector<std::vector<std::vector<double>>> rates(n);
  std::vector<double> scratch;

  auto action_value = [&](std::size_t x, std::size_t k, std::span<const double> u) {
    double s = reward[x][k];
    const auto& row = rates[x][k];
    for (std::size_t y = 0; y < n; ++y) s += row[y] * u[y];
    return s;
  };
  auto best_action = [&](std::size_t x, std::span<const double> u) {
    std::size_t best = 0;
    double best_value = action_value(x, 0, u);
    for (std::size_t k = 1; k < reward[x].size(); ++k) {
      const double val = action_value(x, k, u);
      if (maximize ? val > best_value : val < best_value) {
        best = k;
        best_value = val;
      }
    }
    return std::pair{best, best_value};
  };

  for (std::size_t i = N; i-- > 0;) {
    for (std::size_t x = 0; x < n; ++x) {
      const auto& d = model.at(cells[i], x);
      const auto opponent = fixed.at(i, x);
      const std::size_t own = maximize ? d.max_count() : d.min_count();
      reward[x].assign(own, 0.0);
      rates[x].assign(own, std::vector<double>(n, 0.0));
      for (std::size_t k = 0; k < own; ++k) {
        for (std::size_t j = 0; j < opponent.size(); ++j) {
          const double w = opponent[j];
          if (w == 0.0) continue;
          const std::size_t a = maximize ? k : j;
          const std::size_t b = maximize ? j : k;
          reward[x][k] += w * d.reward[a][b];
          for (std::size_t y = 0; y < n; ++y) rates[x][k][y] += w * d.rates[a][b][y];
        }
      }
    }
    auto rhs = [&](std::span<const double> u, std::span<double> res) {
      for (std::size_t x = 0; x < n; ++x) res[x] = best_action(x, u).second;
    };
    rk4_backward(v, grid[i + 1] - grid[i], next, rhs, scratch);
    std::swap(v, next);
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<double> pure(reward[x].size(), 0.0);
      pure[best_action(x, v).first] = 1.0;
      out.policy.strategy[i][x] = std::move(pure);
    }
  }
  out.values = std::move(v);
  return out;
}

std::size_t Trajectory::state_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a counter offset by the run seed.
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

PathSampler::PathSampler(const GameModel& model, const MarkovPolicy& pi, const MarkovPolicy& psi)
    : model_(&model), pi_(&pi), psi_(&psi), times_(pi.times) {
  if (pi.side != Side::maximizer || psi.side != Side::minimizer) {
    throw std::invalid_argument("path sampler expects (maximizer, minimizer) policies");
  }
  check_time_grid(model.partition, times_);
  check_policy(model, pi, times_);
  check_policy(model, psi, times_);

  const std::size_t n = model.state_count();
  const std::size_t N = times_.size() - 1;
  cells_ = interval_cells(model.partition, times_);
  rate_.assign(N * n, 0.0);
  cumulative_.assign((N + 1) * n, 0.0);
  std::vector<double> scratch(n);
  for (std::size_t i = 0; i < N; ++i) {
    const double h = times_[i + 1] - times_[i];
    for (std::size_t x = 0; x < n; ++x) {
      averaged_row(model.at(cells_[i], x), pi.at(i, x), psi.at(i, x), rate_[i * n + x], scratch);
      cumulative_[(i + 1) * n + x] = cumulative_[i * n + x] + rate_[i * n + x] * h;
    }
  }
}

std::size_t PathSampler::interval_of(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin());
  return std::min(i == 0 ? 0 : i - 1, times_.size() - 2);
}

double PathSampler::cumulative_reward(std::size_t x, double t) const {
  const std::size_t n = model_->state_count();
  const std::size_t i = interval_of(t);
  return cumulative_[i * n + x] + rate_[i * n + x] * (t - times_[i]);
}

Trajectory PathSampler::sample(std::size_t x0, std::uint64_t seed) const {
  const GameModel& model = *model_;
  if (x0 >= model.state_count()) throw std::out_of_range("initial state out of range");
  const double T = model.horizon();

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Trajectory path;
  path.states.push_back(x0);
  std::size_t x = x0;
  double t = 0.0;
  double reward = 0.0;
  for (;;) {
    const double m = model.uniformization[x];
    std::exponential_distribution<double> holding(m);
    const double proposal = t + holding(gen);
    if (proposal >= T) {
      reward += cumulative_reward(x, T) - cumulative_reward(x, t);
      break;
    }
    reward += cumulative_reward(x, proposal) - cumulative_reward(x, t);
    t = proposal;

    const std::size_t i = interval_of(t);
    const auto& d = model.at(cells_[i], x);
    const std::size_t a = draw(pi_->at(i, x), unif(gen));
    const std::size_t b = draw(psi_->at(i, x), unif(gen));
    const auto& q = d.rates[a][b];
    const double exit = -q[x];
    if (!(unif(gen) * m < exit)) continue;  // fictitious proposal

    const double target = unif(gen) * exit;
    double acc = 0.0;
    std::size_t y = x;
    for (std::size_t z = 0; z < q.size(); ++z) {
      if (z == x || q[z] <= 0.0) continue;
      acc += q[z];
      y = z;
      if (target < acc) break;
    }
    path.jump_times.push_back(t);
    path.states.push_back(y);
    x = y;
  }
  path.running_reward = reward;
  path.terminal_reward = model.terminal[x];
  return path;
}

Trajectory simulate_path(const GameModel& model, const MarkovPolicy& pi,
                         const MarkovPolicy& psi, std::size_t x0, std::uint64_t seed) {
  return PathSampler(model, pi, psi).sample(x0, seed);
}

PayoffEstimate monte_carlo(const GameModel& model, const MarkovPolicy& pi,
                           const MarkovPolicy& psi, std::size_t x0, std::size_t paths,
                           std::uint64_t seed, unsigned threads) {
  if (paths < 2) throw std::invalid_argument("monte_carlo needs at least two paths");
  const PathSampler sampler(model, pi, psi);
  std::vector<double> payoffs(paths);
  detail::parallel_for(paths, threads, [&](std::size_t k) {
    payoffs[k] = sampler.sample(x0, path_seed(seed, k)).payoff();
  });
  const auto [mean, error] = mean_and_error(std::move(payoffs));
  return {mean, error, paths, seed};
}

DriftCheckReport empirical_drift_check(const GameModel& model, const DriftCertificate& cert,
                                       const MarkovPolicy& pi, const MarkovPolicy& psi,
                                       std::size_t x0, double t, std::size_t paths,
                                       std::uint64_t seed, unsigned threads) {
  if (paths < 2) throw std::invalid_argument("drift check needs at least two paths");
  if (!(t >= 0.0) || t > model.horizon()) {
    throw std::out_of_range("drift check time outside [0, T]");
  }
  if (cert.w0.size() != model.state_count()) {
    throw std::invalid_argument("certificate does not match the model");
  }
  const PathSampler sampler(model, pi, psi);
  std::vector<double> weights(paths);
  std::vector<double> payoffs(paths);
  std::vector<std::size_t> jumps(paths);
  detail::parallel_for(paths, threads, [&](std::size_t k) {
    const auto path = sampler.sample(x0, path_seed(seed, k));
    weights[k] = cert.w0[path.state_at(t)];
    payoffs[k] = path.payoff();
    jumps[k] = path.jump_times.size();
  });

  DriftCheckReport report;
  report.x0 = x0;
  report.time = t;
  report.paths = paths;
  report.seed = seed;
  std::tie(report.estimate, report.standard_error) = mean_and_error(std::move(weights));
  report.bound = std::exp(cert.c0 * t) * cert.w0[x0];
  report.margin = report.bound + 4.0 * report.standard_error - report.estimate;
  report.drift_passed = report.margin >= 0.0;
  report.max_jumps = *std::max_element(jumps.begin(), jumps.end());
  std::tie(report.payoff_mean, report.payoff_standard_error) = mean_and_error(std::move(payoffs));
  const double T = model.horizon();
  report.payoff_bound = (T + 1.0) * cert.M0 * std::exp(cert.c0 * T) * cert.w0[x0];
  report.payoff_passed =
      std::abs(report.payoff_mean) <= report.payoff_bound + 4.0 * report.payoff_standard_error;
  return report;
}

}  // namespace jumpgame
