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

#include <doctest.h>

#include <cmath>
#include <set>

#include "builders.hpp"
#include "jumpgame/dynamics.hpp"
#include "jumpgame/io.hpp"
#include "oracles.hpp"

using namespace jumpgame;
using namespace jumpgame::testing;

namespace {

GameModel load(const std::string& name) { return parse_model(io::read_file(corpus_path(name))); }

struct Solved {
  GameModel model;
  std::vector<double> grid;
  ValueGrid values;
  PolicyPair policies;
};

Solved solve(const std::string& name, std::size_t intervals) {
  Solved s{load(name), {}, {}, {}};
  s.grid = make_time_grid(s.model.partition, intervals);
  s.values = isaacs_backward(s.model, s.grid);
  s.policies = extract_policies(s.model, s.values);
  return s;
}

}  // namespace

TEST_CASE("pure death payoff matches the analytic integral") {
  const auto s = solve("pure_death.json", 1000);
  const auto w = evaluate_payoff(s.model, s.policies.maximizer, s.policies.minimizer, s.grid);
  CHECK(std::abs(w[1] - (1.0 - std::exp(-1.0))) <= 1e-10);
  CHECK(w[0] == 0.0);
}

TEST_CASE("degenerate model payoff ignores the policies") {
  const GameModel m = single_state_model({{0.7, 0.7}, {0.7, 0.7}}, 0.3, 2.0);
  const auto grid = make_time_grid(m.partition, 100);
  for (const auto& a : {std::vector<double>{1.0, 0.0}, std::vector<double>{0.3, 0.7}}) {
    for (const auto& b : {std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5}}) {
      const auto pi = constant_policy(m, Side::maximizer, grid, a);
      const auto psi = constant_policy(m, Side::minimizer, grid, b);
      CHECK(std::abs(evaluate_payoff(m, pi, psi, grid)[0] - 1.7) <= 1e-12);
    }
  }
}

TEST_CASE("payoff grid terminal slice and policy validation") {
  const auto s = solve("birth_death.json", 100);
  const auto W = evaluate_payoff_grid(s.model, s.policies.maximizer, s.policies.minimizer, s.grid);
  for (std::size_t x = 0; x < s.model.state_count(); ++x) CHECK(W(100, x) == s.model.terminal[x]);
  CHECK_THROWS(evaluate_payoff(s.model, s.policies.minimizer, s.policies.minimizer, s.grid));
}

TEST_CASE("best responses bracket the equilibrium payoff") {
  for (const auto& name : corpus_models()) {
    CAPTURE(name);
    const auto s = solve(name, 400);
    const auto& pi = s.policies.maximizer;
    const auto& psi = s.policies.minimizer;
    const auto w = evaluate_payoff(s.model, pi, psi, s.grid);
    const auto upper = best_response(s.model, psi, Side::maximizer, s.grid);
    const auto lower = best_response(s.model, pi, Side::minimizer, s.grid);
    CHECK(upper.policy.side == Side::maximizer);
    CHECK(lower.policy.side == Side::minimizer);
    CHECK_NOTHROW(check_policy(s.model, upper.policy, s.grid));
    for (std::size_t x = 0; x < s.model.state_count(); ++x) {
      CHECK(upper.values[x] >= w[x] - 1e-6);
      CHECK(lower.values[x] <= w[x] + 1e-6);
      CHECK(upper.values[x] - lower.values[x] <= 2e-3);
      CHECK(std::abs(w[x] - s.values(0, x)) <= 1e-3);
    }
    // Replaying the piecewise-constant best response loses at most an O(dt)
    // switching error against the optimized value.
    const auto replay = evaluate_payoff(s.model, upper.policy, psi, s.grid);
    for (std::size_t x = 0; x < s.model.state_count(); ++x) {
      CHECK(std::abs(replay[x] - upper.values[x]) <= 2e-3);
      CHECK(replay[x] >= w[x] - 2e-3);
    }
  }
}

TEST_CASE("best response in a one-action model is the payoff") {
  const auto s = solve("pure_death.json", 200);
  const auto w = evaluate_payoff(s.model, s.policies.maximizer, s.policies.minimizer, s.grid);
  const auto br = best_response(s.model, s.policies.minimizer, Side::maximizer, s.grid);
  CHECK(br.values == w);
  CHECK_THROWS(best_response(s.model, s.policies.maximizer, Side::maximizer, s.grid));
}

TEST_CASE("a suboptimal minimizer opens a gap of T times the stage loss") {
  const GameModel m = single_state_model({{3.0, 1.0}, {0.0, 2.0}}, 0.0, 1.0);
  const auto grid = make_time_grid(m.partition, 100);
  const auto psi = constant_policy(m, Side::minimizer, grid, {0.0, 1.0});
  const auto br = best_response(m, psi, Side::maximizer, grid);
  // Against the right column the maximizer plays bottom for 2 per unit time.
  CHECK(br.values[0] == doctest::Approx(2.0));
}

TEST_CASE("paths without jumps earn the averaged reward exactly") {
  const GameModel m = single_state_model({{3.0, 1.0}, {0.0, 2.0}}, 0.25, 1.0);
  const auto grid = make_time_grid(m.partition, 50);
  const auto pi = constant_policy(m, Side::maximizer, grid, {0.5, 0.5});
  const auto psi = constant_policy(m, Side::minimizer, grid, {0.25, 0.75});
  const Trajectory t = simulate_path(m, pi, psi, 0, 123);
  CHECK(t.jump_times.empty());
  CHECK(t.states == std::vector<std::size_t>{0});
  CHECK(t.payoff() == doctest::Approx(1.75).epsilon(1e-13));

  const GameModel rho = single_state_model({{0.7}}, 0.3, 2.0);
  const auto g2 = make_time_grid(rho.partition, 1000);
  const auto one = constant_policy(rho, Side::maximizer, g2, {1.0});
  const auto other = constant_policy(rho, Side::minimizer, g2, {1.0});
  const auto est = monte_carlo(rho, one, other, 0, 500, 9);
  CHECK(est.mean == doctest::Approx(1.7).epsilon(1e-13));
  CHECK(est.standard_error == 0.0);
  CHECK(est.paths == 500);
  CHECK(est.seed == 9);
}

TEST_CASE("sampling is deterministic and independent of thread count") {
  const auto s = solve("random_10_state.json", 200);
  const auto& pi = s.policies.maximizer;
  const auto& psi = s.policies.minimizer;
  const Trajectory a = simulate_path(s.model, pi, psi, 3, 77);
  const Trajectory b = simulate_path(s.model, pi, psi, 3, 77);
  CHECK(a.jump_times == b.jump_times);
  CHECK(a.states == b.states);
  CHECK(a.payoff() == b.payoff());
  const auto e1 = monte_carlo(s.model, pi, psi, 3, 2000, 5, 1);
  const auto e4 = monte_carlo(s.model, pi, psi, 3, 2000, 5, 4);
  CHECK(e1.mean == e4.mean);
  CHECK(e1.standard_error == e4.standard_error);
  CHECK_THROWS(monte_carlo(s.model, pi, psi, 3, 1, 5));

  std::set<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 1000; ++k) seeds.insert(path_seed(5, k));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("trajectory structure") {
  const auto s = solve("server_control.json", 150);
  const PathSampler sampler(s.model, s.policies.maximizer, s.policies.minimizer);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const Trajectory t = sampler.sample(k % 4, path_seed(1, k));
    REQUIRE(t.states.size() == t.jump_times.size() + 1);
    for (std::size_t j = 0; j < t.jump_times.size(); ++j) {
      CHECK(t.jump_times[j] > (j == 0 ? 0.0 : t.jump_times[j - 1]));
      CHECK(t.jump_times[j] <= s.model.horizon());
      CHECK(t.states[j + 1] != t.states[j]);
      CHECK(t.state_at(t.jump_times[j]) == t.states[j + 1]);
    }
    CHECK(t.state_at(0.0) == t.states.front());
    CHECK(t.state_at(s.model.horizon()) == t.terminal_state());
    CHECK(t.terminal_reward == s.model.terminal[t.terminal_state()]);
  }
}

TEST_CASE("first-jump destinations follow the jump kernel") {
  // From x0 the chain leaves at total rate 3 to x1 (rate 1) or x2 (rate 2).
  const GameModel m = one_action_model({{-3.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},
                                       {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, 10.0);
  const auto grid = make_time_grid(m.partition, 10);
  const auto pi = constant_policy(m, Side::maximizer, grid, {1.0});
  const auto psi = constant_policy(m, Side::minimizer, grid, {1.0});
  const PathSampler sampler(m, pi, psi);
  double counts[3] = {0.0, 0.0, 0.0};
  const int n = 30000;
  for (int k = 0; k < n; ++k) {
    const Trajectory t = sampler.sample(0, path_seed(31, k));
    counts[t.states.size() > 1 ? t.states[1] : 0] += 1.0;
  }
  // Staying in x0 past T = 10 has probability e^{-30}; ignore that cell.
  const double jumped = counts[1] + counts[2];
  CHECK(jumped == n);
  const double e1 = jumped / 3.0;
  const double e2 = 2.0 * jumped / 3.0;
  const double chi2 = (counts[1] - e1) * (counts[1] - e1) / e1 + (counts[2] - e2) * (counts[2] - e2) / e2;
  CHECK(chi2 < 6.635);  // one degree of freedom, 1% level
}

TEST_CASE("Monte Carlo agrees with the exact evaluator") {
  for (const auto& name : {"pure_death.json", "birth_death.json", "random_10_state.json"}) {
    CAPTURE(name);
    const auto s = solve(name, 300);
    const auto w = evaluate_payoff(s.model, s.policies.maximizer, s.policies.minimizer, s.grid);
    const std::size_t x0 = s.model.state_count() - 1;
    const auto est = monte_carlo(s.model, s.policies.maximizer, s.policies.minimizer, x0, 20000, 3);
    CHECK(std::abs(est.mean - w[x0]) <= 4.0 * est.standard_error);
  }
}

TEST_CASE("drift checks") {
  SUBCASE("pure death with a nonconstant weight") {
    const auto s = solve("pure_death.json", 100);
    const auto& cert = *s.model.certificate;
    const auto r = empirical_drift_check(s.model, cert, s.policies.maximizer, s.policies.minimizer,
                                         1, 1.0, 100000, 42);
    const double truth = 2.0 * std::exp(-1.0) + (1.0 - std::exp(-1.0));
    CHECK(std::abs(r.estimate - truth) <= 4.0 * r.standard_error);
    CHECK(r.bound == doctest::Approx(2.0 * std::exp(1.0)));
    CHECK(r.drift_passed);
    CHECK(r.payoff_passed);
    CHECK(r.passed());
    CHECK(r.max_jumps == 1);
    CHECK(r.payoff_bound == doctest::Approx(2.0 * 1.0 * std::exp(1.0) * 2.0));
  }
  SUBCASE("unit weight is trivially bounded") {
    const auto s = solve("random_10_state.json", 100);
    const auto cert = auto_certificate(s.model);
    const auto r = empirical_drift_check(s.model, cert, s.policies.maximizer, s.policies.minimizer,
                                         0, 0.5, 2000, 1);
    CHECK(r.estimate == 1.0);
    CHECK(r.standard_error == 0.0);
    CHECK(r.passed());
  }
}
