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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "jumpgame/jumpgame.hpp"

namespace jumpgame::cli {

using nlohmann::json;

namespace {

// Routed to exit status 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GameModel load_model(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  try {
    return parse_model(text);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ValidationOptions validation_options(const RunConfig& c) {
  return {c.row_tol, c.certificate_tol};
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.matrix_tol = c.matrix_tol;
  o.threads = c.threads;
  return o;
}

json report_to_json(const ValidationReport& report) {
  return json::parse(io::report_json(report));
}

// Model and certificate checks shared by the solving subcommands. Prints the
// report and returns false on failure.
bool checked_model(const GameModel& model, const RunConfig& config, DriftCertificate& cert,
                   std::ostream& out) {
  auto report = validate_model(model, validation_options(config));
  if (!report.all_passed()) {
    out << io::report_json(report);
    return false;
  }
  cert = model.certificate ? *model.certificate : auto_certificate(model);
  auto cert_report = validate_certificate(model, cert, validation_options(config));
  if (!cert_report.all_passed()) {
    out << io::report_json(cert_report);
    return false;
  }
  return true;
}

json state_values(const GameModel& model, std::span<const double> v) {
  json out = json::object();
  for (std::size_t x = 0; x < model.state_count(); ++x) out[model.states[x]] = v[x];
  return out;
}

void write_if(const std::string& path, std::string_view content) {
  if (!path.empty()) io::write_file(path, content);
}

MarkovPolicy load_policy(const GameModel& model, const std::string& path, Side expected) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  try {
    auto policy = io::parse_policy(model, text);
    if (policy.side != expected) {
      throw InputError(path + ": expected a " + std::string(to_string(expected)) + " policy");
    }
    return policy;
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Policies from files when both are given, otherwise from a fresh solve.
PolicyPair obtain_policies(const GameModel& model, const DriftCertificate& cert,
                           const RunConfig& config, std::optional<ValueGrid>& solved) {
  if (config.policy_max.empty() != config.policy_min.empty()) {
    throw InputError("--policy-max and --policy-min must be given together");
  }
  if (!config.policy_max.empty()) {
    PolicyPair pair{load_policy(model, config.policy_max, Side::maximizer),
                    load_policy(model, config.policy_min, Side::minimizer)};
    if (pair.maximizer.times != pair.minimizer.times) {
      throw InputError("policy files use different time grids");
    }
    return pair;
  }
  const auto grid = make_time_grid(model.partition, config.grid);
  auto result = value_iterate(model, cert, grid, solver_options(config));
  auto policies = extract_policies(model, result.values, solver_options(config));
  solved = std::move(result.values);
  return policies;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GameModel model = load_model(config.model_path);
    const auto model_report = validate_model(model, validation_options(config));
    json doc;
    doc["model"] = report_to_json(model_report);
    bool passed = model_report.all_passed();
    if (passed) {
      const bool from_file = model.certificate.has_value();
      const DriftCertificate cert = from_file ? *model.certificate : auto_certificate(model);
      const auto cert_report = validate_certificate(model, cert, validation_options(config));
      doc["certificate"] = report_to_json(cert_report);
      doc["certificate"]["source"] = from_file ? "file" : "auto";
      doc["certificate"]["constants"] = {
          {"c0", cert.c0}, {"c1", cert.c1}, {"M0", cert.M0}, {"M1", cert.M1}};
      passed = cert_report.all_passed();
    }
    doc["passed"] = passed;
    out << doc.dump(2) << "\n";
    return passed ? kExitOk : kExitFailure;
  });
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GameModel model = load_model(config.model_path);
    DriftCertificate cert;
    if (!checked_model(model, config, cert, out)) return kExitFailure;

    const auto grid = make_time_grid(model.partition, config.grid);
    const auto options = solver_options(config);
    json summary;
    summary["grid_intervals"] = grid.size() - 1;

    std::optional<IterationResult> iterated;
    std::optional<ValueGrid> integrated;
    if (config.method != Method::ode) {
      try {
        iterated = value_iterate(model, cert, grid, options);
      } catch (const NonConvergenceError& e) {
        write_if(config.out_values, io::values_csv(model, e.last_iterate()));
        write_if(config.out_diagnostics, io::diagnostics_json(e.diagnostics()));
        err << "error: " << e.what() << "\n";
        return kExitFailure;
      }
    }
    if (config.method != Method::iterate) integrated = isaacs_backward(model, grid, options);

    const ValueGrid& values = iterated ? iterated->values : *integrated;
    const auto policies = extract_policies(model, values, options);

    json diagnostics = json::object();
    if (iterated) {
      diagnostics = json::parse(io::diagnostics_json(iterated->diagnostics));
      summary["iterations"] = iterated->diagnostics.iterations;
      summary["fixed_point_residual"] = iterated->diagnostics.fixed_point_residual;
    }
    summary["method"] = config.method == Method::iterate ? "iterate"
                        : config.method == Method::ode   ? "ode"
                                                         : "both";
    summary["value_at_0"] = state_values(model, values.slice(0));

    bool agreed = true;
    if (iterated && integrated) {
      const double gap = sup_distance(iterated->values, *integrated);
      agreed = gap <= config.agreement_tol;
      summary["solver_gap"] = gap;
      summary["agreement_tolerance"] = config.agreement_tol;
      summary["agreement_passed"] = agreed;
      diagnostics["solver_gap"] = gap;
    }

    write_if(config.out_values, io::values_csv(model, values));
    write_if(config.out_policy_max, io::policy_json(model, policies.maximizer));
    write_if(config.out_policy_min, io::policy_json(model, policies.minimizer));
    write_if(config.out_diagnostics, diagnostics.dump(2) + "\n");
    out << summary.dump(2) << "\n";
    return agreed ? kExitOk : kExitFailure;
  });
}

int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GameModel model = load_model(config.model_path);
    DriftCertificate cert;
    if (!checked_model(model, config, cert, out)) return kExitFailure;

    std::optional<ValueGrid> solved;
    const auto policies = obtain_policies(model, cert, config, solved);
    const auto& grid = policies.maximizer.times;

    const auto upper = best_response(model, policies.minimizer, Side::maximizer, grid);
    const auto lower = best_response(model, policies.maximizer, Side::minimizer, grid);
    const auto payoff = evaluate_payoff(model, policies.maximizer, policies.minimizer, grid);

    json states = json::array();
    double max_gap = 0.0;
    for (std::size_t x = 0; x < model.state_count(); ++x) {
      const double gap = upper.values[x] - lower.values[x];
      max_gap = std::max(max_gap, gap);
      json entry = {{"state", model.states[x]},
                    {"best_response_max", upper.values[x]},
                    {"best_response_min", lower.values[x]},
                    {"gap", gap},
                    {"payoff", payoff[x]}};
      if (solved) entry["value"] = (*solved)(0, x);
      states.push_back(std::move(entry));
    }
    const bool passed = max_gap <= config.saddle_tol;
    json doc = {{"states", std::move(states)},
                {"max_gap", max_gap},
                {"saddle_tolerance", config.saddle_tol},
                {"passed", passed}};
    out << doc.dump(2) << "\n";
    return passed ? kExitOk : kExitFailure;
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const GameModel model = load_model(config.model_path);
    DriftCertificate cert;
    if (!checked_model(model, config, cert, out)) return kExitFailure;
    if (config.paths < 2) throw InputError("--paths must be at least 2");

    std::optional<ValueGrid> solved;
    const auto policies = obtain_policies(model, cert, config, solved);

    std::vector<std::size_t> initial;
    if (config.initial_state) {
      try {
        initial.push_back(model.state_index(*config.initial_state));
      } catch (const std::out_of_range& e) {
        throw InputError(e.what());
      }
    } else {
      for (std::size_t x = 0; x < model.state_count(); ++x) initial.push_back(x);
    }
    const double t = config.drift_time.value_or(model.horizon());
    if (!(t >= 0.0) || t > model.horizon()) throw InputError("--time must lie in [0, T]");

    json estimates = json::array();
    json drift = json::array();
    bool passed = true;
    std::vector<Trajectory> dumped;
    const PathSampler sampler(model, policies.maximizer, policies.minimizer);
    for (std::size_t x0 : initial) {
      const auto est = monte_carlo(model, policies.maximizer, policies.minimizer, x0,
                                   config.paths, config.seed, config.threads);
      json e = json::parse(io::estimate_json(est));
      e["state"] = model.states[x0];
      estimates.push_back(std::move(e));

      const auto report = empirical_drift_check(model, cert, policies.maximizer,
                                                 policies.minimizer, x0, t, config.paths,
                                                 config.seed, config.threads);
      passed = passed && report.passed();
      drift.push_back(json::parse(io::drift_report_json(model, report)));

      if (!config.out_trajectories.empty()) {
        const std::size_t count = std::min(config.dump_paths, config.paths);
        for (std::size_t k = 0; k < count; ++k) {
          dumped.push_back(sampler.sample(x0, path_seed(config.seed, k)));
        }
      }
    }
    write_if(config.out_trajectories, io::trajectories_csv(model, dumped));
    json doc = {{"estimates", std::move(estimates)},
                {"drift_checks", std::move(drift)},
                {"certificate_source", model.certificate ? "file" : "auto"},
                {"passed", passed}};
    out << doc.dump(2) << "\n";
    return passed ? kExitOk : kExitFailure;
  });
}

int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Matrix payoff;
    try {
      payoff = io::parse_matrix_csv(io::read_file(config.matrix_path));
    } catch (const std::exception& e) {
      throw InputError(config.matrix_path + ": " + e.what());
    }
    out << io::matrix_solution_json(solve_matrix_game(payoff, config.matrix_tol));
    return kExitOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Solver for finite zero-sum continuous-time jump games", "jumpgame"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", config.model_path, "Model file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--row-tol", config.row_tol, "Tolerance on rate row sums")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cert-tol", config.certificate_tol, "Slack in certificate inequalities")
        ->check(CLI::PositiveNumber);
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--grid", config.grid, "Number of time-grid intervals")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    sub->add_option("--tol", config.tol, "Value-iteration sup-norm tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--matrix-tol", config.matrix_tol, "Matrix-game saddle tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", config.max_iter, "Value-iteration limit");
    sub->add_option("--threads", config.threads, "Worker threads (0 = hardware)");
  };
  auto add_policies = [&](CLI::App* sub) {
    sub->add_option("--policy-max", config.policy_max,
                    "Maximizer policy file (recomputed when omitted)");
    sub->add_option("--policy-min", config.policy_min,
                    "Minimizer policy file (recomputed when omitted)");
  };

  auto* validate = app.add_subcommand("validate", "Check a model and its drift certificate");
  add_model(validate);

  auto* solve = app.add_subcommand("solve", "Compute the value function and optimal policies");
  add_model(solve);
  add_solver(solve);
  solve->add_option("--method", config.method, "Solver: iterate, ode or both")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Method>{
              {"iterate", Method::iterate}, {"ode", Method::ode}, {"both", Method::both}},
          CLI::ignore_case))
      ->default_str("both");
  solve->add_option("--agreement-tol", config.agreement_tol,
                    "Largest accepted gap between the two solvers")
      ->check(CLI::PositiveNumber);
  solve->add_option("--out-values", config.out_values, "Value CSV output");
  solve->add_option("--out-policy-max", config.out_policy_max, "Maximizer policy output");
  solve->add_option("--out-policy-min", config.out_policy_min, "Minimizer policy output");
  solve->add_option("--out-diagnostics", config.out_diagnostics, "Diagnostics output");

  auto* certify = app.add_subcommand("certify", "Best-response check of a policy pair");
  add_model(certify);
  add_solver(certify);
  add_policies(certify);
  certify->add_option("--saddle-tol", config.saddle_tol, "Largest accepted duality gap")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo payoff and drift checks");
  add_model(simulate);
  add_solver(simulate);
  add_policies(simulate);
  simulate->add_option("--paths", config.paths, "Number of simulated paths")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", config.seed, "Random seed");
  simulate->add_option("--x0", config.initial_state, "Initial state (all states when omitted)");
  simulate->add_option("--time", config.drift_time, "Drift-check time (default T)");
  simulate->add_option("--out-trajectories", config.out_trajectories, "Trajectory CSV output");
  simulate->add_option("--dump-paths", config.dump_paths, "Paths per state in the dump");

  auto* matrix = app.add_subcommand("matrix", "Solve a matrix game from a CSV file");
  matrix->add_option("--in", config.matrix_path, "Payoff matrix CSV")
      ->required()
      ->check(CLI::ExistingFile);
  matrix->add_option("--matrix-tol", config.matrix_tol, "Saddle tolerance")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (validate->parsed()) {
    config.subcommand = "validate";
    return cmd_validate(config, out, err);
  }
  if (solve->parsed()) {
    config.subcommand = "solve";
    return cmd_solve(config, out, err);
  }
  if (certify->parsed()) {
    config.subcommand = "certify";
    return cmd_certify(config, out, err);
  }
  if (simulate->parsed()) {
    config.subcommand = "simulate";
    return cmd_simulate(config, out, err);
  }
  config.subcommand = "matrix";
  return cmd_matrix(config, out, err);
}

}  // namespace jumpgame::cli
