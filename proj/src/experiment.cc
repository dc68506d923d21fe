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

#include "epimeas/experiment.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "epimeas/csv.h"
#include "epimeas/errors.h"
#include "epimeas/io.h"
#include "epimeas/oracle.h"
#include "epimeas/parallel.h"

namespace epimeas {

namespace {

constexpr double kStep = 0.1;
constexpr double kLoadMargin = 0.95;
constexpr double kSeedInfected = 0.05;
constexpr double kOtherInfected = 0.01;
constexpr double kBatch = 100.0;
constexpr double kCapacity = 1000.0;

std::string Cell(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : "";
}

std::string RowCells(const BudgetRow& row) {
  return FormatDouble(row.budget) + "," + FormatDouble(row.greedy_value) + "," +
         Cell(row.opt_value) + "," + Cell(row.gamma1_lb) + "," +
         Cell(row.gamma2_hat) + "," + Cell(row.guarantee_fraction);
}

constexpr char kBudgetHeader[] =
    "B,greedy_value,opt_value,gamma1_lb,gamma2_hat,guarantee_fraction";

// Mean of an optional column; empty unless every row has a value.
std::optional<double> MeanOf(const std::vector<std::optional<double>>& cells) {
  double total = 0.0;
  for (const auto& cell : cells) {
    if (!cell) return std::nullopt;
    total += *cell;
  }
  return total / static_cast<double>(cells.size());
}

PemsInstance LoadOrGenerate(const ExperimentSpec& spec, int replication) {
  if (spec.instance_path) return ParsePemsInstance(ReadJsonFile(*spec.instance_path));
  return GenerateInstance(DeriveSeed(spec.seed, replication), spec.instance_template);
}

std::string SweepPreamble(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << kSchemaLine << "# generator: " << kRngName << "; seed: " << spec.seed
      << "; source: "
      << (spec.instance_path ? std::string("file") : TemplateName(spec.instance_template))
      << "; replications: " << spec.replications << "; grid: " << spec.grid_points;
  if (spec.mode == SweepMode::kPems) {
    out << "; objective: " << ObjectiveLetter(spec.objective)
        << "; measured-error: " << (spec.measure_error ? "yes" : "no");
  }
  out << '\n';
  return out.str();
}

std::vector<BudgetRow> SweepReplication(const ExperimentSpec& spec, int replication,
                                        const std::vector<double>& budgets) {
  const PemsInstance instance = LoadOrGenerate(spec, replication);
  const PemsProblem problem = BuildPemsProblem(instance, spec.grid_points);
  RowOptions options;
  if (spec.measure_error) {
    std::vector<Selection> probes{Selection(problem.copies.size(), 0), problem.copies};
    for (size_t m = 0; m < problem.copies.size(); ++m) {
      Selection single(problem.copies.size(), 0);
      single[m] = 1;
      probes.push_back(std::move(single));
    }
    const QuadratureError error =
        EstimateQuadratureError(instance, spec.grid_points, probes, spec.objective);
    options.epsilon = error.objective;
    options.matrix_epsilon = error.matrix;
  }
  std::vector<BudgetRow> rows;
  for (double budget : budgets) {
    rows.push_back(EvaluateBudget(problem, budget, spec.objective, options));
  }
  return rows;
}

std::string RunPemsSweep(const ExperimentSpec& spec) {
  std::vector<double> budgets;
  if (spec.budgets) {
    budgets = BudgetValues(*spec.budgets);
  } else {
    budgets = DefaultBudgets(BuildPemsProblem(LoadOrGenerate(spec, 0), spec.grid_points));
  }
  const auto per_replication =
      ParallelMap(static_cast<size_t>(spec.replications), spec.workers,
                  [&](size_t r) { return SweepReplication(spec, static_cast<int>(r), budgets); });

  std::ostringstream out;
  out << SweepPreamble(spec) << "replication," << kBudgetHeader << '\n';
  for (size_t r = 0; r < per_replication.size(); ++r) {
    for (const BudgetRow& row : per_replication[r]) {
      out << r << ',' << RowCells(row) << '\n';
    }
  }
  for (size_t b = 0; b < budgets.size(); ++b) {
    BudgetRow mean;
    mean.budget = budgets[b];
    std::vector<std::optional<double>> greedy, opt, g1, g2, fraction;
    for (const auto& rows : per_replication) {
      greedy.push_back(rows[b].greedy_value);
      opt.push_back(rows[b].opt_value);
      g1.push_back(rows[b].gamma1_lb);
      g2.push_back(rows[b].gamma2_hat);
      fraction.push_back(rows[b].guarantee_fraction);
    }
    mean.greedy_value = *MeanOf(greedy);
    mean.opt_value = MeanOf(opt);
    mean.gamma1_lb = MeanOf(g1);
    mean.gamma2_hat = MeanOf(g2);
    mean.guarantee_fraction = MeanOf(fraction);
    out << "mean," << RowCells(mean) << '\n';
  }
  return out.str();
}

struct PimsRow {
  double cost = 0.0;
  double pair_bound = 0.0;
  double bound_ratio = 0.0;
  std::optional<double> oracle_cost;
  bool identified = false;
};

PimsRow PimsReplication(const ExperimentSpec& spec, int replication) {
  const PemsInstance base = LoadOrGenerate(spec, replication);
  CounterRng rng(DeriveSeed(DeriveSeed(spec.seed, replication), 1));
  const PimsInstance instance(
      base.network, base.initial,
      RandomUnitCosts(rng, spec.pims_first_time, spec.pims_last_time,
                      base.network.num_nodes()));
  PimsRow row;
  const PairStrategy strategy = SelectPairStrategy(instance);
  row.cost = strategy.cost;
  row.pair_bound = PairCostBound(instance);
  row.bound_ratio = row.pair_bound / (3.0 * MinCandidateCost(instance));
  try {
    row.oracle_cost = BruteForcePimsPairs(instance).value;
  } catch (const GuardExceeded&) {
  }
  const Theta truth{rng.Uniform(base.beta_prior.lo, base.beta_prior.hi),
                    rng.Uniform(base.delta_prior.lo, base.delta_prior.hi)};
  row.identified =
      IdentifyTheta(instance, strategy.measurements,
                    MeasureExactly(instance, strategy.measurements, truth))
          .identified;
  return row;
}

std::string RunPimsSweep(const ExperimentSpec& spec) {
  const auto rows = ParallelMap(
      static_cast<size_t>(spec.replications), spec.workers,
      [&](size_t r) { return PimsReplication(spec, static_cast<int>(r)); });
  std::ostringstream out;
  out << SweepPreamble(spec)
      << "replication,cost,pair_bound,bound_ratio,oracle_cost,identified\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    out << r << ',' << FormatDouble(rows[r].cost) << ','
        << FormatDouble(rows[r].pair_bound) << ',' << FormatDouble(rows[r].bound_ratio)
        << ',' << Cell(rows[r].oracle_cost) << ',' << (rows[r].identified ? 1 : 0)
        << '\n';
  }
  return out.str();
}

}  // namespace

InstanceTemplate ParseTemplate(const std::string& name) {
  if (name == "small") return InstanceTemplate::kSmall;
  if (name == "large") return InstanceTemplate::kLarge;
  throw ValidationError("unknown template '" + name + "'");
}

std::string TemplateName(InstanceTemplate which) {
  return which == InstanceTemplate::kSmall ? "small" : "large";
}

std::vector<Edge> DefaultTopology() {
  std::vector<Edge> edges;
  for (int i = 0; i < 5; ++i) edges.push_back({i, i, 1.0});
  for (auto [from, to] : {std::pair{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}, {2, 4}}) {
    edges.push_back({from, to, 1.0});
  }
  return edges;
}

MeasurementCosts RandomUnitCosts(CounterRng& rng, int first_time, int last_time,
                                 int num_nodes) {
  MeasurementCosts costs(first_time, last_time, num_nodes);
  for (int k = first_time; k <= last_time; ++k) {
    for (int i = 0; i < num_nodes; ++i) {
      const double cost = rng.UniformInt(1, 3);
      costs.Set(k, i, StateKind::kInfected, cost);
      costs.Set(k, i, StateKind::kRecovered, cost);
    }
  }
  return costs;
}

PemsInstance GenerateInstance(uint64_t seed, InstanceTemplate which,
                              const std::vector<Edge>& topology) {
  std::vector<Edge> edges = topology.empty() ? DefaultTopology() : topology;
  int n = 0;
  for (const Edge& e : edges) n = std::max({n, e.from + 1, e.to + 1});
  CounterRng rng(seed);
  for (Edge& e : edges) e.weight = rng.Uniform(0.5, 1.5);

  const BetaPrior beta_prior{which == InstanceTemplate::kSmall ? 6.0 : 8.0, 3.0, 3.0, 7.0};
  const BetaPrior delta_prior{3.0, 4.0, 1.0, 4.0};
  std::vector<double> closed(n, 0.0);
  for (const Edge& e : edges) closed[e.to] += e.weight;
  const double load =
      kStep * beta_prior.hi * *std::max_element(closed.begin(), closed.end());
  if (load > kLoadMargin) {
    for (Edge& e : edges) e.weight *= kLoadMargin / load;
  }

  std::vector<double> infected(n, kOtherInfected);
  infected[0] = kSeedInfected;
  const bool small = which == InstanceTemplate::kSmall;
  const int first = small ? 5 : 1;
  const int last = 5;
  const int copies = small ? 2 : 10;
  PemsInstance instance{EpidemicNetwork(n, std::move(edges), kStep),
                        MakeInitialCondition(infected),
                        RandomUnitCosts(rng, first, last, n),
                        0.0,
                        std::vector<int>(n, copies),
                        std::vector<int>(n, copies),
                        std::vector<double>(n, kBatch),
                        std::vector<double>(n, kBatch),
                        std::vector<double>(n, kCapacity),
                        beta_prior,
                        delta_prior};
  double total = 0.0;
  for (int k = first; k <= last; ++k) {
    for (int i = 0; i < n; ++i) {
      total += copies * (*instance.costs.Get(k, i, StateKind::kInfected) +
                         *instance.costs.Get(k, i, StateKind::kRecovered));
    }
  }
  instance.budget = std::round(0.25 * total);
  ValidatePemsInstance(instance);
  return instance;
}

nlohmann::json GeneratedInstanceJson(const PemsInstance& instance, uint64_t seed,
                                     InstanceTemplate which) {
  nlohmann::json doc = PemsInstanceToJson(instance);
  doc["generator"] = std::string(kRngName);
  doc["seed"] = seed;
  doc["template"] = TemplateName(which);
  return doc;
}

BudgetSweep ParseBudgetSweep(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("budget sweep must be lo:hi:step, got '" + text + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0] || parts[0] < 0.0) {
    throw ValidationError("budget sweep must be lo:hi:step with 0 <= lo <= hi, step > 0");
  }
  return {parts[0], parts[1], parts[2]};
}

std::vector<double> BudgetValues(const BudgetSweep& sweep) {
  const int count = static_cast<int>(std::floor((sweep.hi - sweep.lo) / sweep.step + 1e-9)) + 1;
  std::vector<double> values;
  for (int i = 0; i < count; ++i) values.push_back(sweep.lo + i * sweep.step);
  return values;
}

std::vector<double> DefaultBudgets(const PemsProblem& problem) {
  const double lo = MinUnitCost(problem);
  double hi = 0.0;
  for (size_t m = 0; m < problem.copies.size(); ++m) {
    hi += problem.copies[m] * problem.unit_costs[m];
  }
  std::vector<double> values;
  for (int i = 0; i < 10; ++i) values.push_back(lo + (hi - lo) * i / 9.0);
  return values;
}

BudgetRow EvaluateBudget(const PemsProblem& problem, double budget,
                         Objective objective, const RowOptions& options) {
  const PemsProblem at_budget = WithBudget(problem, budget);
  const PemsProblem restricted = RestrictToBudget(at_budget);
  const GreedyResult greedy = RunGreedy(restricted, objective);
  BudgetRow row;
  row.budget = budget;
  row.greedy_value = greedy.value;
  if (options.oracle) {
    try {
      row.opt_value = BruteForcePems(at_budget, objective).value;
    } catch (const GuardExceeded&) {
    }
  }
  if (objective == Objective::kLogDet) {
    row.guarantee_fraction = GuaranteeFraction(objective);
  } else if (options.bounds) {
    row.gamma1_lb =
        Gamma1LowerBound(restricted, greedy.trace, options.matrix_epsilon).bound;
    row.gamma2_hat = Gamma2Estimate(restricted, greedy.trace, objective, options.epsilon);
    row.guarantee_fraction = GuaranteeFraction(objective, *row.gamma1_lb, *row.gamma2_hat);
  }
  return row;
}

std::string BudgetRowsCsv(const std::vector<BudgetRow>& rows) {
  std::ostringstream out;
  out << kSchemaLine << kBudgetHeader << '\n';
  for (const BudgetRow& row : rows) out << RowCells(row) << '\n';
  return out.str();
}

std::string RunSweep(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw ValidationError("replications must be at least 1");
  if (spec.grid_points < 1) throw ValidationError("grid points must be at least 1");
  return spec.mode == SweepMode::kPems ? RunPemsSweep(spec) : RunPimsSweep(spec);
}

}  // namespace epimeas
