// Copyright 2020 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 ok, 1 other failure, 2 invalid input,
// 3 an exhaustive routine refused because its search space is too large.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epimeas/csv.h"
#include "epimeas/dynamics.h"
#include "epimeas/errors.h"
#include "epimeas/experiment.h"
#include "epimeas/io.h"
#include "epimeas/oracle.h"
#include "epimeas/pems.h"
#include "epimeas/pims.h"

namespace epimeas {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitGuard = 3;

Theta ParseTheta(const std::string& text) {
  const size_t comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ValidationError("theta must be written beta,delta; got '" + text + "'");
  }
}

void Emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    WriteTextFile(path, text);
  }
}

std::string Join(const std::vector<MeasurementId>& ids) {
  std::string out;
  for (const MeasurementId& id : ids) {
    if (!out.empty()) out += ';';
    out += ToString(id);
  }
  return out;
}

std::string SelectionText(const PemsProblem& problem, const Selection& counts) {
  std::string out;
  for (size_t m = 0; m < counts.size(); ++m) {
    if (counts[m] == 0) continue;
    if (!out.empty()) out += ';';
    out += ToString(problem.measurements[m]) + "*" + std::to_string(counts[m]);
  }
  return out;
}

std::string ElementsText(const PemsProblem& problem,
                         const std::vector<GroundElement>& elements) {
  std::string out;
  for (const GroundElement& e : elements) {
    if (!out.empty()) out += ' ';
    out += ToString(problem.measurements[e.measurement]) + "#" + std::to_string(e.copy);
  }
  return out;
}

std::string OracleCsv(double value, const std::string& optimizer, double space,
                      double seconds) {
  std::ostringstream out;
  out << kSchemaLine << "value,optimizer,space_size,seconds\n"
      << FormatDouble(value) << ',' << optimizer << ',' << FormatDouble(space) << ','
      << FormatDouble(seconds) << '\n';
  return out.str();
}

struct CommonOptions {
  std::string instance;
  std::string costs;
  std::string objective = "d";
  std::string out;
  int grid_points = 33;
  int workers = 1;
  double budget = -1.0;  // negative: use the instance's budget
};

PemsProblem LoadProblem(const CommonOptions& opts) {
  PemsProblem problem =
      BuildPemsProblem(ParsePemsInstance(ReadJsonFile(opts.instance)), opts.grid_points,
                       opts.workers);
  if (opts.budget >= 0.0) problem.budget = opts.budget;
  return problem;
}

int Run(int argc, char** argv) {
  CLI::App app{"Measurement selection for parameter identification and estimation "
               "in networked SIR models"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded template instance");
  std::string template_name = "small";
  uint64_t seed = 1;
  std::string gen_out, topology_path, pims_costs_path, pims_window = "1:5";
  double gen_budget = -1.0;
  gen->add_option("--template", template_name, "small or large");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", gen_out, "Instance file (stdout if omitted)");
  gen->add_option("--topology", topology_path, "Network JSON whose edge list replaces the bundled topology");
  gen->add_option("--budget", gen_budget, "Override the default budget");
  gen->add_option("--pims-costs", pims_costs_path, "Also write an exact-measurement cost file");
  gen->add_option("--pims-window", pims_window, "t1:t2 of that cost file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Export a trajectory as CSV");
  CommonOptions sim_opts;
  std::string theta_text;
  int steps = 10;
  bool with_sensitivities = false;
  sim->add_option("--instance", sim_opts.instance, "Network JSON")->required();
  sim->add_option("--theta", theta_text, "beta,delta")->required();
  sim->add_option("--steps", steps, "Number of steps");
  sim->add_flag("--sensitivities", with_sensitivities, "Append theta-derivative columns");
  sim->add_option("--out", sim_opts.out, "Output CSV");

  // pims solve
  auto* pims = app.add_subcommand("pims", "Exact-measurement selection");
  auto* pims_solve = pims->add_subcommand("solve", "Cheapest identifying pair strategy");
  pims->require_subcommand(1);
  CommonOptions pims_opts;
  std::string theta_true;
  pims_solve->add_option("--instance", pims_opts.instance, "Network JSON")->required();
  pims_solve->add_option("--costs", pims_opts.costs, "Cost JSON")->required();
  pims_solve->add_option("--theta-true", theta_true, "beta,delta used to check recovery");
  pims_solve->add_option("--out", pims_opts.out, "Output CSV");

  // pems solve
  auto* pems = app.add_subcommand("pems", "Noisy-measurement selection");
  auto* pems_solve = pems->add_subcommand("solve", "Greedy selection under a budget");
  pems->require_subcommand(1);
  CommonOptions pems_opts;
  std::string sweep_text;
  bool with_bounds = false;
  bool no_oracle = false;
  uint64_t pems_seed = 0;
  pems_solve->add_option("--instance", pems_opts.instance, "Instance JSON")->required();
  pems_solve->add_option("--objective", pems_opts.objective, "a (trace) or d (log-det)");
  pems_solve->add_option("--budget-sweep", sweep_text, "lo:hi:step");
  pems_solve->add_flag("--bounds", with_bounds, "Compute the ratio bounds");
  pems_solve->add_flag("--no-oracle", no_oracle, "Skip the brute-force column");
  pems_solve->add_option("--seed", pems_seed, "Recorded in the output; the solver is deterministic");
  pems_solve->add_option("--grid-points", pems_opts.grid_points, "Quadrature points per axis");
  pems_solve->add_option("--workers", pems_opts.workers, "Threads for quadrature");
  pems_solve->add_option("--out", pems_opts.out, "Output CSV");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exhaustive reference computations");
  oracle->require_subcommand(1);
  CommonOptions oracle_opts;
  auto add_oracle = [&](const char* name, const char* help, bool needs_costs) {
    auto* sub = oracle->add_subcommand(name, help);
    sub->add_option("--instance", oracle_opts.instance, "Instance JSON")->required();
    if (needs_costs) {
      sub->add_option("--costs", oracle_opts.costs, "Cost JSON")->required();
    } else {
      sub->add_option("--objective", oracle_opts.objective, "a or d");
      sub->add_option("--budget", oracle_opts.budget, "Override the instance budget");
      sub->add_option("--grid-points", oracle_opts.grid_points, "Quadrature points per axis");
      sub->add_option("--workers", oracle_opts.workers, "Threads for quadrature");
    }
    sub->add_option("--out", oracle_opts.out, "Output CSV");
    return sub;
  };
  auto* oracle_pems = add_oracle("pems", "Brute-force optimum over the selection lattice", false);
  auto* oracle_pims = add_oracle("pims", "Exhaustive equation-pair scan", true);
  auto* oracle_gamma1 = add_oracle("gamma1", "Exhaustive submodularity ratio along the greedy chain", false);
  auto* oracle_audit = add_oracle("audit", "Exhaustive diminishing-returns audit", false);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Replicated budget sweep");
  ExperimentSpec spec;
  std::string sweep_instance, sweep_template = "small", mode = "pems",
              sweep_objective = "d", sweep_budgets, sweep_out;
  sweep->add_option("--instance", sweep_instance, "Instance JSON instead of a template");
  sweep->add_option("--template", sweep_template, "small or large");
  sweep->add_option("--mode", mode, "pems or pims");
  sweep->add_option("--objective", sweep_objective, "a or d");
  sweep->add_option("--budget-sweep", sweep_budgets, "lo:hi:step");
  sweep->add_option("--replications", spec.replications, "Number of random weight draws");
  sweep->add_option("--seed", spec.seed, "Master seed");
  sweep->add_option("--grid-points", spec.grid_points, "Quadrature points per axis");
  sweep->add_option("--workers", spec.workers, "Replications run concurrently");
  sweep->add_flag("--measure-error", spec.measure_error, "Use grid-doubling error in the bounds");
  sweep->add_option("--out", sweep_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (gen->parsed()) {
    const InstanceTemplate which = ParseTemplate(template_name);
    std::vector<Edge> topology;
    if (!topology_path.empty()) {
      topology = ParseNetworkInstance(ReadJsonFile(topology_path)).network.edges();
    }
    PemsInstance instance = GenerateInstance(seed, which, topology);
    if (gen_budget >= 0.0) instance.budget = gen_budget;
    Emit(GeneratedInstanceJson(instance, seed, which).dump(2) + "\n", gen_out);
    if (!pims_costs_path.empty()) {
      const BudgetSweep window = ParseBudgetSweep(pims_window + ":1");
      CounterRng rng(DeriveSeed(seed, 1));
      const MeasurementCosts costs =
          RandomUnitCosts(rng, static_cast<int>(window.lo), static_cast<int>(window.hi),
                          instance.network.num_nodes());
      WriteTextFile(pims_costs_path, CostsToJson(costs).dump(2) + "\n");
    }
    return kExitOk;
  }

  if (sim->parsed()) {
    const NetworkInstance base = ParseNetworkInstance(ReadJsonFile(sim_opts.instance));
    const Theta theta = ParseTheta(theta_text);
    if (with_sensitivities) {
      Emit(TrajectoryCsv(SimulateWithSensitivities(base.network, base.initial, theta, steps)),
           sim_opts.out);
    } else {
      Emit(TrajectoryCsv(Simulate(base.network, base.initial, theta, steps)), sim_opts.out);
    }
    return kExitOk;
  }

  if (pims_solve->parsed()) {
    const PimsInstance instance =
        ParsePimsInstance(ReadJsonFile(pims_opts.instance), ReadJsonFile(pims_opts.costs));
    const PairStrategy strategy = SelectPairStrategy(instance);
    const double bound = PairCostBound(instance);
    std::ostringstream out;
    out << kSchemaLine
        << "selected,cost,pair_bound,bound_ratio,x_equation,r_equation,beta_hat,delta_hat,rank\n"
        << Join(strategy.measurements) << ',' << FormatDouble(strategy.cost) << ','
        << FormatDouble(bound) << ','
        << FormatDouble(bound / (3.0 * MinCandidateCost(instance))) << ','
        << ToString(strategy.infected_equation) << ','
        << ToString(strategy.recovered_equation) << ',';
    if (!theta_true.empty()) {
      const IdentificationResult id = IdentifyTheta(
          instance, strategy.measurements,
          MeasureExactly(instance, strategy.measurements, ParseTheta(theta_true)));
      if (id.estimate) {
        out << FormatDouble(id.estimate->beta) << ',' << FormatDouble(id.estimate->delta);
      } else {
        out << ',';
      }
      out << ',' << id.rank;
    } else {
      out << ",,";
    }
    out << '\n';
    Emit(out.str(), pims_opts.out);
    return kExitOk;
  }

  if (pems_solve->parsed()) {
    const Objective objective = ParseObjective(pems_opts.objective);
    const PemsProblem problem = LoadProblem(pems_opts);
    const std::vector<double> budgets =
        sweep_text.empty() ? std::vector<double>{problem.budget}
                           : BudgetValues(ParseBudgetSweep(sweep_text));
    RowOptions options;
    options.oracle = !no_oracle;
    options.bounds = with_bounds;
    std::vector<BudgetRow> rows;
    for (double b : budgets) rows.push_back(EvaluateBudget(problem, b, objective, options));
    std::string csv = BudgetRowsCsv(rows);
    if (pems_seed != 0) {
      csv.insert(std::string(kSchemaLine).size(), "# seed: " + std::to_string(pems_seed) + "\n");
    }
    Emit(csv, pems_opts.out);
    return kExitOk;
  }

  if (oracle_pims->parsed()) {
    const PimsInstance instance = ParsePimsInstance(ReadJsonFile(oracle_opts.instance),
                                                    ReadJsonFile(oracle_opts.costs));
    const PimsOracleReport report = BruteForcePimsPairs(instance);
    Emit(OracleCsv(report.value, Join(report.optimizer), report.space_size, report.seconds),
         oracle_opts.out);
    return kExitOk;
  }

  if (oracle_pems->parsed() || oracle_gamma1->parsed() || oracle_audit->parsed()) {
    const Objective objective = ParseObjective(oracle_opts.objective);
    const PemsProblem problem = LoadProblem(oracle_opts);
    if (oracle_pems->parsed()) {
      const PemsOracleReport report = BruteForcePems(problem, objective);
      Emit(OracleCsv(report.value, SelectionText(problem, report.optimizer),
                     report.space_size, report.seconds),
           oracle_opts.out);
      return kExitOk;
    }
    const auto start = std::chrono::steady_clock::now();
    const PemsProblem restricted = RestrictToBudget(problem);
    const SetFunction f = ObjectiveFunction(restricted, objective);
    const double ground = static_cast<double>(GroundSet(restricted).size());
    if (oracle_gamma1->parsed()) {
      const GreedyResult greedy = RunGreedy(restricted, objective);
      const double gamma = ExhaustiveGamma1(restricted, f, greedy.trace);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      Emit(OracleCsv(gamma, SelectionText(restricted, greedy.selection),
                     std::exp2(ground) * (greedy.trace.chain.size() + 1.0), seconds),
           oracle_opts.out);
      return kExitOk;
    }
    const AuditResult audit = AuditSubmodularity(restricted, f, 1e-9);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string witness;
    if (audit.counterexample) {
      witness = "A={" + ElementsText(restricted, audit.counterexample->smaller) + "} B={" +
                ElementsText(restricted, audit.counterexample->larger) + "} y=" +
                ElementsText(restricted, {audit.counterexample->added});
    }
    Emit(OracleCsv(audit.passed ? 1.0 : 0.0, witness, audit.checked, seconds),
         oracle_opts.out);
    return kExitOk;
  }

  if (sweep->parsed()) {
    if (!sweep_instance.empty()) spec.instance_path = sweep_instance;
    spec.instance_template = ParseTemplate(sweep_template);
    if (mode == "pems") {
      spec.mode = SweepMode::kPems;
    } else if (mode == "pims") {
      spec.mode = SweepMode::kPims;
    } else {
      throw ValidationError("mode must be pems or pims");
    }
    spec.objective = ParseObjective(sweep_objective);
    if (!sweep_budgets.empty()) spec.budgets = ParseBudgetSweep(sweep_budgets);
    Emit(RunSweep(spec), sweep_out);
    return kExitOk;
  }
  return kExitFailure;
}

}  // namespace
}  // namespace epimeas

int main(int argc, char** argv) {
  try {
    return epimeas::Run(argc, argv);
  } catch (const epimeas::GuardExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return epimeas::kExitGuard;
  } catch (const epimeas::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return epimeas::kExitInvalid;
  } catch (const epimeas::PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return epimeas::kExitInvalid;
  } catch (const epimeas::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return epimeas::kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return epimeas::kExitFailure;
  }
}
