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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "commands.hpp"
#include "jumpgame/jumpgame.hpp"
#include "oracles.hpp"

using namespace jumpgame;
using namespace jumpgame::testing;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

GameModel load(const std::string& name) { return parse_model(io::read_file(corpus_path(name))); }

DriftCertificate certificate_of(const GameModel& m) {
  return m.certificate ? *m.certificate : auto_certificate(m);
}

// Both solvers at the cross-check resolution, computed once per model.
struct Solved {
  GameModel model;
  std::vector<double> grid;
  IterationResult iterated;
  ValueGrid integrated;
  PolicyPair policies;
  double iterate_seconds = 0.0;
  double ode_seconds = 0.0;
};

constexpr std::size_t kCrossCheckGrid = 2000;

const Solved& solved(const std::string& name) {
  static std::map<std::string, Solved> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  Solved s;
  s.model = load(name);
  s.grid = make_time_grid(s.model.partition, kCrossCheckGrid);
  auto start = std::chrono::steady_clock::now();
  s.iterated = value_iterate(s.model, certificate_of(s.model), s.grid);
  s.iterate_seconds = seconds_since(start);
  start = std::chrono::steady_clock::now();
  s.integrated = isaacs_backward(s.model, s.grid);
  s.ode_seconds = seconds_since(start);
  s.policies = extract_policies(s.model, s.iterated.values);
  return cache.emplace(name, std::move(s)).first->second;
}

Verdict matrix_game_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  double value_err = 0.0;
  double invariant_err = 0.0;
  double residual = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + trial % 4;
    const std::size_t q = 1 + (trial / 4) % 4;
    const Matrix M = random_matrix(rng, p, q, -5.0, 5.0);
    const auto s = solve_matrix_game(M);
    value_err = std::max(value_err, std::abs(s.value - support_enumeration_value(M)));
    residual = std::max(residual, s.residual);

    const double c = shift(rng);
    const double a = scale(rng);
    Matrix shifted = M;
    Matrix scaled = M;
    Matrix dual(q, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        shifted(i, j) += c;
        scaled(i, j) *= a;
        dual(j, i) = -M(i, j);
      }
    }
    invariant_err = std::max({invariant_err,
                              std::abs(solve_matrix_game(shifted).value - (s.value + c)),
                              std::abs(solve_matrix_game(scaled).value - a * s.value),
                              std::abs(solve_matrix_game(dual).value + s.value)});
  }
  const double elapsed = seconds_since(start);
  return {value_err <= 1e-6 && invariant_err <= 1e-9 && residual <= 1e-9 && elapsed < 5.0,
          fmt("200 games: max |value - oracle| = %.3g (<= 1e-6), max invariant error = %.3g "
              "(<= 1e-9), max residual = %.3g, %.2f s (< 5 s)",
              value_err, invariant_err, residual, elapsed)};
}

Verdict degenerate_model() {
  const GameModel m = load("degenerate.json");
  const auto grid = make_time_grid(m.partition, 1000);
  const double vi = value_iterate(m, auto_certificate(m), grid).values(0, 0);
  const double ode = isaacs_backward(m, grid)(0, 0);
  // One action per side here; the two-action copy below exercises mixing.
  const auto pi = constant_policy(m, Side::maximizer, grid, {1.0});
  const auto psi = constant_policy(m, Side::minimizer, grid, {1.0});
  double eval_err = std::abs(evaluate_payoff(m, pi, psi, grid)[0] - 1.7);
  const GameModel wide = single_state_model({{0.7, 0.7}, {0.7, 0.7}}, 0.3, 2.0);
  for (double a : {0.0, 0.3, 1.0}) {
    for (double b : {0.0, 0.6, 1.0}) {
      const auto wp = constant_policy(wide, Side::maximizer, grid, {a, 1.0 - a});
      const auto wq = constant_policy(wide, Side::minimizer, grid, {b, 1.0 - b});
      eval_err = std::max(eval_err, std::abs(evaluate_payoff(wide, wp, wq, grid)[0] - 1.7));
    }
  }
  const double err = std::max({std::abs(vi - 1.7), std::abs(ode - 1.7), eval_err});
  return {err <= 1e-6, fmt("u(0): iterate %.12g, ode %.12g; max error incl. evaluation %.3g "
                           "(<= 1e-6)",
                           vi, ode, err)};
}

Verdict stage_game_reduction() {
  const GameModel m = load("stage_2x2.json");
  const auto grid = make_time_grid(m.partition, 1000);
  const auto vi = value_iterate(m, auto_certificate(m), grid).values;
  const auto ode = isaacs_backward(m, grid);
  const double err = std::max(std::abs(vi(0, 0) - 1.5), std::abs(ode(0, 0) - 1.5));
  const auto pols = extract_policies(m, vi);
  const auto cells = interval_cells(m.partition, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const Matrix M = stage_matrix(m, cells[i], vi.slice(i), 0, StageForm::generator);
    worst = std::max(worst, check_saddle(M, pols.maximizer.at(i, 0), pols.minimizer.at(i, 0)));
  }
  return {err <= 1e-4 && worst <= 1e-9,
          fmt("u(0) error %.3g (<= 1e-4), max stage residual %.3g (<= 1e-9)", err, worst)};
}

Verdict solver_cross_check() {
  Verdict v;
  double worst_gap = 0.0;
  double worst_time = 0.0;
  std::string worst_model;
  for (const auto& name : corpus_models()) {
    const Solved& s = solved(name);
    const double gap = sup_distance(s.iterated.values, s.integrated);
    const double time = s.iterate_seconds + s.ode_seconds;
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_model = name;
    }
    worst_time = std::max(worst_time, time);
    if (gap > 1e-3 || time >= 60.0) v.passed = false;
  }
  v.detail = fmt("%zu models at N = %zu: max gap %.3g on %s (<= 1e-3), slowest %.2f s (< 60 s)",
                 corpus_models().size(), kCrossCheckGrid, worst_gap, worst_model.c_str(),
                 worst_time);
  return v;
}

// Grid-halving estimate of the quadrature error of the iteration's fixed point.
double quadrature_slack(const GameModel& m, const DriftCertificate& cert, std::size_t intervals) {
  const auto fine = make_time_grid(m.partition, intervals);
  const auto coarse = make_time_grid(m.partition, intervals / 2);
  const auto uf = value_iterate(m, cert, fine).values;
  const auto uc = value_iterate(m, cert, coarse).values;
  double slack = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const auto at = std::find(fine.begin(), fine.end(), coarse[i]);
    if (at == fine.end()) continue;
    const auto j = static_cast<std::size_t>(at - fine.begin());
    for (std::size_t x = 0; x < m.state_count(); ++x) {
      slack = std::max(slack, std::abs(uf(j, x) - uc(i, x)));
    }
  }
  return slack;
}

Verdict monotone_iteration() {
  Verdict v;
  double worst_ratio = 0.0;
  std::string summary;
  for (const auto& name : corpus_models()) {
    const GameModel m = load(name);
    const auto cert = auto_certificate(m);
    const std::size_t N = 1000;
    const double slack = quadrature_slack(m, cert, N);
    const auto grid = make_time_grid(m.partition, N);
    const auto d = value_iterate(m, cert, grid).diagnostics;
    const double bound = 1e-6 + slack;
    const double mono = d.max_monotonicity_violation();
    const double env = d.max_envelope_violation();
    worst_ratio = std::max(worst_ratio, std::max(mono, env) / bound);
    if (mono > bound || env > bound) {
      v.passed = false;
      summary += fmt(" %s(mono %.3g, env %.3g, bound %.3g)", name.c_str(), mono, env, bound);
    }
  }
  v.detail = fmt("auto certificate, N = 1000: worst violation / (1e-6 + slack) = %.3g", worst_ratio) +
             summary;
  return v;
}

Verdict saddle_certification() {
  Verdict v;
  double worst_gap = 0.0;
  double worst_outside = 0.0;
  for (const auto& name : corpus_models()) {
    const Solved& s = solved(name);
    const auto upper = best_response(s.model, s.policies.minimizer, Side::maximizer, s.grid);
    const auto lower = best_response(s.model, s.policies.maximizer, Side::minimizer, s.grid);
    // The bracket is computed on the Isaacs discretization; the iterated
    // value may sit outside it by at most the gap between the two solvers.
    const double solver_gap = sup_distance(s.iterated.values, s.integrated);
    for (std::size_t x = 0; x < s.model.state_count(); ++x) {
      const double gap = upper.values[x] - lower.values[x];
      const double u = s.iterated.values(0, x);
      const double outside = std::max({0.0, lower.values[x] - u, u - upper.values[x]});
      worst_gap = std::max(worst_gap, gap);
      worst_outside = std::max(worst_outside, outside - solver_gap);
      if (gap > 2e-3 || outside > solver_gap + 1e-12) v.passed = false;
    }
  }
  v.detail = fmt("max BR_max - BR_min = %.3g (<= 2e-3); u(0) outside bracket beyond solver gap "
                 "by %.3g (<= 0)",
                 worst_gap, std::max(0.0, worst_outside));
  return v;
}

Verdict evaluation_consistency() {
  Verdict v;
  double worst = 0.0;
  for (const auto& name : corpus_models()) {
    const Solved& s = solved(name);
    const auto w = evaluate_payoff(s.model, s.policies.maximizer, s.policies.minimizer, s.grid);
    for (std::size_t x = 0; x < s.model.state_count(); ++x) {
      worst = std::max(worst, std::abs(w[x] - s.iterated.values(0, x)));
    }
  }
  v.passed = worst <= 1e-3;
  v.detail = fmt("max |W(pi*, psi*) - u(0)| = %.3g (<= 1e-3)", worst);
  return v;
}

Verdict simulation_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  const Solved& s = solved("pure_death.json");
  const std::size_t paths = 100000;
  const std::uint64_t seed = 42;
  const std::size_t x0 = s.model.state_index("1");
  const auto est = monte_carlo(s.model, s.policies.maximizer, s.policies.minimizer, x0, paths, seed);
  const double truth = 1.0 - std::exp(-1.0);
  const double z = std::abs(est.mean - truth) / est.standard_error;

  const PathSampler sampler(s.model, s.policies.maximizer, s.policies.minimizer);
  std::vector<double> first_jump;
  first_jump.reserve(paths);
  for (std::size_t k = 0; k < paths; ++k) {
    const Trajectory t = sampler.sample(x0, path_seed(seed, k));
    first_jump.push_back(t.jump_times.empty() ? std::numeric_limits<double>::infinity()
                                              : t.jump_times.front());
  }
  const double ks = ks_distance(first_jump, s.model.horizon(),
                                [](double t) { return -std::expm1(-t); });
  const double critical = ks_critical_1pct(paths);
  const double elapsed = seconds_since(start);
  return {z <= 4.0 && ks <= critical && elapsed < 10.0,
          fmt("mean %.6f vs %.6f, |z| = %.2f (<= 4); KS %.4g (<= %.4g); %.2f s (< 10 s)",
              est.mean, truth, z, ks, critical, elapsed)};
}

Verdict drift_bound() {
  Verdict v;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t checks = 0;
  for (const auto& name : corpus_models()) {
    const Solved& s = solved(name);
    const auto cert = certificate_of(s.model);
    for (double t : {0.5 * s.model.horizon(), s.model.horizon()}) {
      for (std::size_t x0 = 0; x0 < s.model.state_count(); ++x0) {
        const auto r = empirical_drift_check(s.model, cert, s.policies.maximizer,
                                             s.policies.minimizer, x0, t, 20000, 1234 + x0);
        ++checks;
        worst_margin = std::min(worst_margin, r.margin);
        if (!r.passed()) {
          v.passed = false;
          v.detail += fmt(" %s(x0=%zu,t=%g)", name.c_str(), x0, t);
        }
      }
    }
  }
  v.detail = fmt("%zu checks at t in {T/2, T}, smallest margin %.4g", checks, worst_margin) +
             v.detail;
  return v;
}

Verdict terminal_condition() {
  Verdict v;
  std::size_t mismatches = 0;
  for (const auto& name : corpus_models()) {
    const Solved& s = solved(name);
    const std::size_t last = s.grid.size() - 1;
    for (std::size_t x = 0; x < s.model.state_count(); ++x) {
      if (s.iterated.values(last, x) != s.model.terminal[x]) ++mismatches;
      if (s.integrated(last, x) != s.model.terminal[x]) ++mismatches;
    }
  }
  v.passed = mismatches == 0;
  v.detail = fmt("%zu bitwise mismatches of u(T) against g over both solvers", mismatches);
  return v;
}

Verdict grid_convergence() {
  Verdict v;
  std::string detail;
  SolverOptions tight;
  tight.tol = 1e-13;
  for (const auto& name : corpus_models()) {
    const GameModel m = load(name);
    if (m.cell_count() != 1) continue;
    const auto cert = auto_certificate(m);
    auto u0 = [&](std::size_t N) {
      const auto u = value_iterate(m, cert, make_time_grid(m.partition, N), tight).values;
      return std::vector<double>(u.slice(0).begin(), u.slice(0).end());
    };
    const auto a = u0(250);
    const auto b = u0(500);
    const auto c = u0(1000);
    double d1 = 0.0, d2 = 0.0, scale = 1.0;
    for (std::size_t x = 0; x < m.state_count(); ++x) {
      d1 = std::max(d1, std::abs(b[x] - a[x]));
      d2 = std::max(d2, std::abs(c[x] - b[x]));
      scale = std::max(scale, std::abs(c[x]));
    }
    // Below this floor both changes are roundoff: the scheme is exact on the model.
    const double floor = 1e-10 * scale;
    if (d1 <= floor && d2 <= floor) {
      detail += fmt(" %s: exact", name.c_str());
      continue;
    }
    const double ratio = d1 / d2;
    detail += fmt(" %s: %.2f", name.c_str(), ratio);
    if (!(ratio >= 1.8)) v.passed = false;
  }
  v.detail = "change ratio N=250->500 over N=500->1000 (>= 1.8):" + detail;
  return v;
}

struct CliRun {
  int code;
  std::string stdout_text;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "jumpgame");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

Verdict reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "jumpgame_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto solve = [&](const std::string& tag, const std::string& threads) {
    const auto p = [&](const std::string& f) { return (dir / (tag + f)).string(); };
    const auto r = run_cli({"solve", "--model", corpus_path("random_10_state.json"), "--grid",
                            "500", "--threads", threads, "--out-values", p(".csv"),
                            "--out-policy-max", p("_max.json"), "--out-policy-min",
                            p("_min.json"), "--out-diagnostics", p("_diag.json")});
    return std::to_string(r.code) + r.stdout_text + io::read_file(p(".csv")) +
           io::read_file(p("_max.json")) + io::read_file(p("_min.json")) +
           io::read_file(p("_diag.json"));
  };
  auto simulate = [&](const std::string& tag, const std::string& threads) {
    const auto p = (dir / (tag + "_paths.csv")).string();
    const auto r = run_cli({"simulate", "--model", corpus_path("ring_pursuit.json"), "--grid",
                            "500", "--paths", "5000", "--seed", "99", "--threads", threads,
                            "--out-trajectories", p});
    return std::to_string(r.code) + r.stdout_text + io::read_file(p);
  };
  const std::string s1 = solve("a", "1");
  const bool solve_same = s1 == solve("b", "1") && s1 == solve("c", "4") && s1 == solve("d", "0");
  const std::string m1 = simulate("a", "1");
  const bool sim_same =
      m1 == simulate("b", "1") && m1 == simulate("c", "4") && m1 == simulate("d", "0");
  const bool ran = s1.front() == '0' && m1.front() == '0';
  fs::remove_all(dir);
  return {solve_same && sim_same && ran,
          fmt("solve identical: %s, simulate identical: %s over threads {1, 1, 4, auto}",
              solve_same ? "yes" : "no", sim_same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"matrix-game oracle equivalence", matrix_game_oracle},
      {"degenerate analytic model", degenerate_model},
      {"stage-game reduction", stage_game_reduction},
      {"solver cross-check", solver_cross_check},
      {"monotone iteration and envelope", monotone_iteration},
      {"saddle certification", saddle_certification},
      {"evaluation consistency", evaluation_consistency},
      {"simulation fidelity", simulation_fidelity},
      {"drift bound", drift_bound},
      {"terminal condition", terminal_condition},
      {"grid convergence", grid_convergence},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.passed) ++failed;
    std::printf("%s  %2zu %-32s %s\n", v.passed ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
