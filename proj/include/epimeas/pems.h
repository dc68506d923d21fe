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

// Budgeted selection of noisy measurements that maximizes the reduction of
// the Bayesian Cramer-Rao lower bound on (beta, delta).

#ifndef EPIMEAS_PEMS_H_
#define EPIMEAS_PEMS_H_

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epimeas/bayes.h"
#include "epimeas/info_matrix.h"
#include "epimeas/measurement.h"
#include "epimeas/network.h"

namespace epimeas {

enum class Objective {
  kTrace,   // Tr(Fp^-1) - Tr((Fp + H)^-1)
  kLogDet,  // ln det(Fp + H) - ln det(Fp)
};

// 'a' for kTrace, 'd' for kLogDet; throws ValidationError otherwise.
Objective ParseObjective(const std::string& text);
char ObjectiveLetter(Objective objective);

struct PemsInstance {
  EpidemicNetwork network;
  InitialCondition initial;
  // Sample costs on the window; every entry must be set and positive.
  MeasurementCosts costs;
  double budget = 0.0;
  std::vector<int> infected_copies;    // per node, >= 1
  std::vector<int> recovered_copies;   // per node, >= 1
  std::vector<double> infected_batch;  // tests per x copy
  std::vector<double> recovered_batch; // tests per r copy
  std::vector<double> test_capacity;   // per node
  BetaPrior beta_prior;
  BetaPrior delta_prior;

  int first_time() const { return costs.first_time(); }
  int last_time() const { return costs.last_time(); }
};

// Throws ValidationError if the instance breaks an invariant, including the
// model assumptions over the whole prior box and the per-node test capacity.
void ValidatePemsInstance(const PemsInstance& instance);

// Every sample in the window, sorted by (node, time, kind).
std::vector<MeasurementId> WindowMeasurements(const PemsInstance& instance);

// Precomputed data the selection routines work on. Index m refers to
// measurements[m] throughout.
struct PemsProblem {
  std::vector<MeasurementId> measurements;
  std::vector<int> copies;
  std::vector<double> unit_costs;
  std::vector<InfoMatrix> atoms;
  InfoMatrix prior;
  double budget = 0.0;
};

PemsProblem BuildPemsProblem(const PemsInstance& instance, int points_per_axis,
                             int workers = 1);

// Copy of `problem` with a different budget.
PemsProblem WithBudget(PemsProblem problem, double budget);

// Drops every measurement whose unit cost exceeds the budget.
PemsProblem RestrictToBudget(PemsProblem problem);

// One copy of one measurement; ordered by (node, time, kind, copy).
struct GroundElement {
  int measurement = 0;
  int copy = 0;

  auto operator<=>(const GroundElement&) const = default;
};

std::vector<GroundElement> GroundSet(const PemsProblem& problem);

// Number of copies chosen per measurement.
using Selection = std::vector<int>;

Selection ToSelection(const PemsProblem& problem,
                      std::span<const GroundElement> elements);
double SelectionCost(const PemsProblem& problem, const Selection& selection);
InfoMatrix PosteriorInformation(const PemsProblem& problem,
                                const Selection& selection);
double Evaluate(const PemsProblem& problem, const Selection& selection,
                Objective objective);
double MinUnitCost(const PemsProblem& problem);
double MaxUnitCost(const PemsProblem& problem);
// Budget test with a relative slack of 1e-9 against rounding in cost sums.
bool WithinBudget(double cost, double budget);

struct GreedyTrace {
  std::optional<GroundElement> best_single;
  double best_single_value = 0.0;
  // Elements accepted by the cost-benefit scan, in order.
  std::vector<GroundElement> chain;
  // Elements dropped because they broke the budget, in order.
  std::vector<GroundElement> rejected;
  double chain_value = 0.0;
  bool chose_chain = true;
};

struct GreedyResult {
  Selection selection;
  double value = 0.0;
  double cost = 0.0;
  GreedyTrace trace;
};

// Better of the best feasible singleton and the cost-benefit chain. Every
// ground element must fit the budget on its own (PreconditionError).
GreedyResult RunGreedy(const PemsProblem& problem, Objective objective);

// RestrictToBudget followed by RunGreedy.
GreedyResult SolvePems(const PemsProblem& problem, Objective objective);

enum class Gamma1Bound {
  kEigenRatio,  // exact eigenvalues of Fp + H(...)
  kWeylSplit,   // eigenvalues of Fp and each H bounded separately
};

struct Gamma1Report {
  double bound = 1.0;
  // Per chain prefix j, the element minimizing the eigenvalue ratio on top
  // of it; empty when every element is already in the prefix.
  std::vector<std::optional<GroundElement>> witnesses;
};

// Lower bound on the type-1 greedy submodularity ratio of the trace
// objective along the chain of `trace`. `perturbation` widens every
// eigenvalue ratio to (l2 - p) / (l1 + p) to cover quadrature error in the
// matrices.
Gamma1Report Gamma1LowerBound(const PemsProblem& problem,
                              const GreedyTrace& trace,
                              double perturbation = 0.0,
                              Gamma1Bound variant = Gamma1Bound::kEigenRatio);

// Largest g with f(Y1) - eps/2 >= g * (f(y + chain_j) - f(chain_j) + eps) for
// every chain prefix j and every y that breaks the budget on top of it.
// +inf when no pair has a positive right-hand side.
double Gamma2Estimate(const PemsProblem& problem, const GreedyTrace& trace,
                      Objective objective, double epsilon = 0.0);

// Approximation factor of the greedy result. gamma1/gamma2 are ignored for
// kLogDet.
double GuaranteeFraction(Objective objective, double gamma1 = 1.0,
                         double gamma2 = 1.0);

// Additive loss caused by objective error epsilon.
double GuaranteeSlack(Objective objective, double budget, double min_cost,
                      double max_cost, double epsilon);

// Objective of a selection evaluated without the precomputed atoms: the
// expected information is integrated directly with the counts inside the
// integrand, then turned into Tr(C) or ln det(C) of C = (Fp + E[F])^-1.
double BcrlbFunctional(const PemsInstance& instance, const ThetaGrid& grid,
                       const Selection& counts, Objective objective);

struct QuadratureError {
  double objective = 0.0;  // max |f_m - f_2m| over probes, doubled
  double matrix = 0.0;     // max Frobenius change of Fp + H over probes
};

// Compares the objective at points_per_axis and 2 * points_per_axis over the
// probe selections.
QuadratureError EstimateQuadratureError(const PemsInstance& instance,
                                        int points_per_axis,
                                        std::span<const Selection> probes,
                                        Objective objective, int workers = 1);

}  // namespace epimeas

#endif  // EPIMEAS_PEMS_H_
