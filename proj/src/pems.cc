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

#include "epimeas/pems.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "epimeas/errors.h"

namespace epimeas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SamplingModel ModelOf(const PemsInstance& instance) {
  return {&instance.network, &instance.initial, instance.infected_batch,
          instance.recovered_batch};
}

// Eigenvalue ratio l2 / l1 widened by `p`, clamped at zero.
double WidenedRatio(double smaller, double larger, double p) {
  const double ratio = (smaller - p) / (larger + p);
  return std::max(ratio, 0.0);
}

double EigenRatio(const InfoMatrix& m, double p) {
  const Eigenvalues2 eig = Eig2(m);
  return WidenedRatio(eig.second, eig.first, p);
}

}  // namespace

Objective ParseObjective(const std::string& text) {
  if (text == "a") return Objective::kTrace;
  if (text == "d") return Objective::kLogDet;
  throw ValidationError("objective must be 'a' or 'd', got '" + text + "'");
}

char ObjectiveLetter(Objective objective) {
  return objective == Objective::kTrace ? 'a' : 'd';
}

void ValidatePemsInstance(const PemsInstance& instance) {
  const int n = instance.network.num_nodes();
  const size_t un = static_cast<size_t>(n);
  if (instance.first_time() < 1) throw ValidationError("window must start at t1 >= 1");
  if (instance.costs.num_nodes() != n) {
    throw ValidationError("cost table size does not match the network");
  }
  if (!std::isfinite(instance.budget) || instance.budget < 0.0) {
    throw ValidationError("budget must be finite and non-negative");
  }
  for (int k = instance.first_time(); k <= instance.last_time(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (StateKind kind : {StateKind::kInfected, StateKind::kRecovered}) {
        const auto cost = instance.costs.Get(k, i, kind);
        if (!cost.has_value() || !(*cost > 0.0)) {
          throw ValidationError("sample " + ToString(MeasurementId{i, k, kind}) +
                                " needs a positive cost");
        }
      }
    }
  }
  if (instance.infected_copies.size() != un || instance.recovered_copies.size() != un ||
      instance.infected_batch.size() != un || instance.recovered_batch.size() != un ||
      instance.test_capacity.size() != un) {
    throw ValidationError("copy caps, batch sizes and capacities need one entry per node");
  }
  for (int i = 0; i < n; ++i) {
    if (instance.infected_copies[i] < 1 || instance.recovered_copies[i] < 1) {
      throw ValidationError("copy caps must be at least 1");
    }
    if (!(instance.infected_batch[i] > 0.0) || !(instance.recovered_batch[i] > 0.0)) {
      throw ValidationError("batch sizes must be positive");
    }
    if (instance.infected_copies[i] * instance.infected_batch[i] > instance.test_capacity[i] ||
        instance.recovered_copies[i] * instance.recovered_batch[i] > instance.test_capacity[i]) {
      throw ValidationError("copies times batch size exceeds the node's test capacity");
    }
  }
  instance.beta_prior.Validate();
  instance.delta_prior.Validate();
  if (instance.beta_prior.lo < 0.0 || instance.delta_prior.lo < 0.0) {
    throw ValidationError("prior supports must be non-negative");
  }
  ValidateOrThrow(instance.network, instance.initial,
                  {instance.beta_prior.hi, instance.delta_prior.hi});
}

std::vector<MeasurementId> WindowMeasurements(const PemsInstance& instance) {
  std::vector<MeasurementId> out;
  for (int i = 0; i < instance.network.num_nodes(); ++i) {
    for (int k = instance.first_time(); k <= instance.last_time(); ++k) {
      out.push_back({i, k, StateKind::kInfected});
      out.push_back({i, k, StateKind::kRecovered});
    }
  }
  return out;
}

PemsProblem BuildPemsProblem(const PemsInstance& instance, int points_per_axis,
                             int workers) {
  ValidatePemsInstance(instance);
  PemsProblem problem;
  problem.measurements = WindowMeasurements(instance);
  for (const MeasurementId& m : problem.measurements) {
    const bool infected = m.kind == StateKind::kInfected;
    problem.copies.push_back(infected ? instance.infected_copies[m.node]
                                      : instance.recovered_copies[m.node]);
    problem.unit_costs.push_back(*instance.costs.Get(m.time, m.node, m.kind));
  }
  const ThetaGrid grid =
      BuildThetaGrid(instance.beta_prior, instance.delta_prior, points_per_axis);
  problem.prior = PriorInformation(grid, instance.beta_prior, instance.delta_prior);
  problem.atoms = ComputeInformationAtoms(ModelOf(instance), grid,
                                          problem.measurements, workers);
  problem.budget = instance.budget;
  return problem;
}

PemsProblem WithBudget(PemsProblem problem, double budget) {
  problem.budget = budget;
  return problem;
}

PemsProblem RestrictToBudget(PemsProblem problem) {
  for (size_t m = 0; m < problem.copies.size(); ++m) {
    if (!WithinBudget(problem.unit_costs[m], problem.budget)) problem.copies[m] = 0;
  }
  return problem;
}

std::vector<GroundElement> GroundSet(const PemsProblem& problem) {
  std::vector<GroundElement> out;
  for (size_t m = 0; m < problem.copies.size(); ++m) {
    for (int copy = 0; copy < problem.copies[m]; ++copy) {
      out.push_back({static_cast<int>(m), copy});
    }
  }
  return out;
}

Selection ToSelection(const PemsProblem& problem,
                      std::span<const GroundElement> elements) {
  Selection counts(problem.measurements.size(), 0);
  for (const GroundElement& e : elements) ++counts[e.measurement];
  return counts;
}

double SelectionCost(const PemsProblem& problem, const Selection& selection) {
  double total = 0.0;
  for (size_t m = 0; m < selection.size(); ++m) {
    total += problem.unit_costs[m] * selection[m];
  }
  return total;
}

InfoMatrix PosteriorInformation(const PemsProblem& problem,
                                const Selection& selection) {
  InfoMatrix total = problem.prior;
  for (size_t m = 0; m < selection.size(); ++m) {
    if (selection[m] != 0) total += static_cast<double>(selection[m]) * problem.atoms[m];
  }
  return total;
}

double Evaluate(const PemsProblem& problem, const Selection& selection,
                Objective objective) {
  const InfoMatrix posterior = PosteriorInformation(problem, selection);
  if (!(posterior.det() > 0.0)) {
    throw ValidationError("posterior information is singular");
  }
  if (objective == Objective::kTrace) {
    return problem.prior.inverse_trace() - posterior.inverse_trace();
  }
  return std::log(posterior.det()) - std::log(problem.prior.det());
}

double MinUnitCost(const PemsProblem& problem) {
  double best = kInf;
  for (size_t m = 0; m < problem.copies.size(); ++m) {
    if (problem.copies[m] > 0) best = std::min(best, problem.unit_costs[m]);
  }
  return best;
}

double MaxUnitCost(const PemsProblem& problem) {
  double best = 0.0;
  for (size_t m = 0; m < problem.copies.size(); ++m) {
    if (problem.copies[m] > 0) best = std::max(best, problem.unit_costs[m]);
  }
  return best;
}

bool WithinBudget(double cost, double budget) {
  return cost <= budget + 1e-9 * std::max(1.0, std::abs(budget));
}

GreedyResult RunGreedy(const PemsProblem& problem, Objective objective) {
  const size_t count = problem.measurements.size();
  for (size_t m = 0; m < count; ++m) {
    if (problem.copies[m] > 0 && !WithinBudget(problem.unit_costs[m], problem.budget)) {
      throw PreconditionError("ground element " + ToString(problem.measurements[m]) +
                              " costs more than the budget");
    }
  }
  GreedyResult result;
  GreedyTrace& trace = result.trace;

  // Best singleton. Copies share the atom, so copy 0 represents each group.
  Selection probe(count, 0);
  for (size_t m = 0; m < count; ++m) {
    if (problem.copies[m] == 0) continue;
    probe[m] = 1;
    const double value = Evaluate(problem, probe, objective);
    probe[m] = 0;
    if (!trace.best_single || value > trace.best_single_value) {
      trace.best_single = GroundElement{static_cast<int>(m), 0};
      trace.best_single_value = value;
    }
  }

  // Cost-benefit chain. The pool of group m is copies next_copy[m]..copies-1:
  // both acceptance and rejection consume the lowest remaining copy.
  Selection chain(count, 0);
  std::vector<int> next_copy(count, 0);
  double chain_cost = 0.0;
  double chain_value = 0.0;
  while (true) {
    int best = -1;
    double best_ratio = -kInf;
    double best_value = 0.0;
    for (size_t m = 0; m < count; ++m) {
      if (next_copy[m] >= problem.copies[m]) continue;
      ++chain[m];
      const double value = Evaluate(problem, chain, objective);
      --chain[m];
      const double ratio = (value - chain_value) / problem.unit_costs[m];
      if (best < 0 || ratio > best_ratio) {
        best = static_cast<int>(m);
        best_ratio = ratio;
        best_value = value;
      }
    }
    if (best < 0) break;
    const GroundElement element{best, next_copy[best]};
    ++next_copy[best];
    if (WithinBudget(chain_cost + problem.unit_costs[best], problem.budget)) {
      ++chain[best];
      chain_cost += problem.unit_costs[best];
      chain_value = best_value;
      trace.chain.push_back(element);
    } else {
      trace.rejected.push_back(element);
    }
  }
  trace.chain_value = chain_value;
  trace.chose_chain = !trace.best_single || chain_value >= trace.best_single_value;
  if (trace.chose_chain) {
    result.selection = std::move(chain);
    result.value = chain_value;
  } else {
    result.selection.assign(count, 0);
    result.selection[trace.best_single->measurement] = 1;
    result.value = trace.best_single_value;
  }
  result.cost = SelectionCost(problem, result.selection);
  return result;
}

GreedyResult SolvePems(const PemsProblem& problem, Objective objective) {
  return RunGreedy(RestrictToBudget(problem), objective);
}

Gamma1Report Gamma1LowerBound(const PemsProblem& problem,
                              const GreedyTrace& trace, double perturbation,
                              Gamma1Bound variant) {
  const size_t count = problem.measurements.size();
  const Eigenvalues2 prior_eig = Eig2(problem.prior);
  std::vector<Eigenvalues2> atom_eig;
  for (const InfoMatrix& atom : problem.atoms) atom_eig.push_back(Eig2(atom));

  Gamma1Report report;
  Selection prefix(count, 0);
  InfoMatrix prefix_sum;  // H of the prefix without the prior
  double prefix_h_small = 0.0;  // Weyl bounds on the eigenvalues of H(prefix)
  double prefix_h_large = 0.0;
  for (size_t j = 0; j <= trace.chain.size(); ++j) {
    if (j > 0) {
      const int m = trace.chain[j - 1].measurement;
      ++prefix[m];
      prefix_sum += problem.atoms[m];
      prefix_h_small += atom_eig[m].second;
      prefix_h_large += atom_eig[m].first;
    }
    // Ratio of Fp + H(prefix) [+ H(y)].
    auto ratio = [&](int y) {
      if (variant == Gamma1Bound::kEigenRatio) {
        InfoMatrix total = problem.prior + prefix_sum;
        if (y >= 0) total += problem.atoms[y];
        return EigenRatio(total, perturbation);
      }
      double smaller = prior_eig.second + prefix_h_small;
      double larger = prior_eig.first + prefix_h_large;
      if (y >= 0) {
        smaller += atom_eig[y].second;
        larger += atom_eig[y].first;
      }
      return WidenedRatio(smaller, larger, perturbation);
    };
    int witness = -1;
    double witness_ratio = kInf;
    for (size_t m = 0; m < count; ++m) {
      if (prefix[m] >= problem.copies[m]) continue;
      const double r = ratio(static_cast<int>(m));
      if (r < witness_ratio) {
        witness = static_cast<int>(m);
        witness_ratio = r;
      }
    }
    if (witness < 0) {
      report.witnesses.push_back(std::nullopt);
      continue;
    }
    report.witnesses.push_back(GroundElement{witness, prefix[witness]});
    report.bound = std::min(report.bound, ratio(-1) * witness_ratio);
  }
  return report;
}

double Gamma2Estimate(const PemsProblem& problem, const GreedyTrace& trace,
                      Objective objective, double epsilon) {
  const size_t count = problem.measurements.size();
  const double single = trace.best_single ? trace.best_single_value : 0.0;
  const double lhs = single - 0.5 * epsilon;
  double gamma = kInf;
  Selection prefix(count, 0);
  double prefix_cost = 0.0;
  for (size_t j = 0; j <= trace.chain.size(); ++j) {
    if (j > 0) {
      const int m = trace.chain[j - 1].measurement;
      ++prefix[m];
      prefix_cost += problem.unit_costs[m];
    }
    const double base = Evaluate(problem, prefix, objective);
    for (size_t m = 0; m < count; ++m) {
      if (prefix[m] >= problem.copies[m]) continue;
      if (WithinBudget(prefix_cost + problem.unit_costs[m], problem.budget)) continue;
      ++prefix[m];
      const double rhs = Evaluate(problem, prefix, objective) - base + epsilon;
      --prefix[m];
      if (rhs > 0.0) gamma = std::min(gamma, lhs / rhs);
    }
  }
  return gamma;
}

double GuaranteeFraction(Objective objective, double gamma1, double gamma2) {
  if (objective == Objective::kLogDet) return 0.5 * (1.0 - std::exp(-1.0));
  return 0.5 * std::min(gamma2, 1.0) * (1.0 - std::exp(-gamma1));
}

double GuaranteeSlack(Objective objective, double budget, double min_cost,
                      double max_cost, double epsilon) {
  if (epsilon == 0.0) return 0.0;
  if (objective == Objective::kLogDet) return (budget / min_cost + 1.5) * epsilon;
  return ((budget + max_cost) / min_cost + 1.0) * epsilon;
}

double BcrlbFunctional(const PemsInstance& instance, const ThetaGrid& grid,
                       const Selection& counts, Objective objective) {
  ValidatePemsInstance(instance);
  const std::vector<MeasurementId> measurements = WindowMeasurements(instance);
  const InfoMatrix information =
      PriorInformation(grid, instance.beta_prior, instance.delta_prior) +
      ExpectedSampleInformation(ModelOf(instance), grid, measurements, counts);
  if (objective == Objective::kTrace) return information.inverse_trace();
  return -std::log(information.det());
}

QuadratureError EstimateQuadratureError(const PemsInstance& instance,
                                        int points_per_axis,
                                        std::span<const Selection> probes,
                                        Objective objective, int workers) {
  const PemsProblem coarse = BuildPemsProblem(instance, points_per_axis, workers);
  const PemsProblem fine = BuildPemsProblem(instance, 2 * points_per_axis, workers);
  QuadratureError error;
  for (const Selection& probe : probes) {
    const double gap = std::abs(Evaluate(coarse, probe, objective) -
                                Evaluate(fine, probe, objective));
    error.objective = std::max(error.objective, 2.0 * gap);
    error.matrix = std::max(error.matrix, (PosteriorInformation(coarse, probe) -
                                           PosteriorInformation(fine, probe))
                                              .frobenius());
  }
  return error;
}

}  // namespace epimeas
