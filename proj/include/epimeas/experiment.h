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

// Seeded instance generation and budget sweeps.

#ifndef EPIMEAS_EXPERIMENT_H_
#define EPIMEAS_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epimeas/network.h"
#include "epimeas/pems.h"
#include "epimeas/pims.h"
#include "epimeas/rng.h"

namespace epimeas {

enum class InstanceTemplate {
  kSmall,  // window 5..5, two copies per sample
  kLarge,  // window 1..5, ten copies per sample
};

// "small" or "large".
InstanceTemplate ParseTemplate(const std::string& name);
std::string TemplateName(InstanceTemplate which);

// Bundled five-node topology (weights are placeholders of 1): a directed ring
// 1->2->3->4->5->1 with chords 1->3 and 3->5 and a self-loop on every node.
std::vector<Edge> DefaultTopology();

// Template instance on `topology` (DefaultTopology() when empty). Edge weights
// are drawn from U(0.5, 1.5) in edge order and scaled down, if needed, so that
// h * beta_max * (closed in-weight) <= 0.95 at every node. Costs are drawn
// uniformly from {1, 2, 3} per (k, i) and shared by the x and r samples. The
// budget is a quarter of the total ground-set cost.
PemsInstance GenerateInstance(uint64_t seed, InstanceTemplate which,
                              const std::vector<Edge>& topology = {});

// Instance file with the generator identifier, seed and template recorded.
nlohmann::json GeneratedInstanceJson(const PemsInstance& instance, uint64_t seed,
                                     InstanceTemplate which);

// Costs on first..last drawn from {1, 2, 3}, shared by x and r.
MeasurementCosts RandomUnitCosts(CounterRng& rng, int first_time, int last_time,
                                 int num_nodes);

struct BudgetSweep {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
};

// "lo:hi:step"; throws ValidationError on malformed text or step <= 0.
BudgetSweep ParseBudgetSweep(const std::string& text);
// lo, lo + step, ... up to hi (inclusive within rounding).
std::vector<double> BudgetValues(const BudgetSweep& sweep);
// Ten evenly spaced budgets from the cheapest sample to the whole ground set.
std::vector<double> DefaultBudgets(const PemsProblem& problem);

struct BudgetRow {
  double budget = 0.0;
  double greedy_value = 0.0;
  std::optional<double> opt_value;  // empty past the oracle guard
  std::optional<double> gamma1_lb;
  std::optional<double> gamma2_hat;
  std::optional<double> guarantee_fraction;
};

struct RowOptions {
  bool oracle = true;
  bool bounds = true;
  double epsilon = 0.0;        // objective error used in gamma2_hat
  double matrix_epsilon = 0.0; // matrix error used in gamma1_lb
};

// Greedy, brute force and the ratio bounds at one budget. The ratio bounds
// are defined for the trace objective only and stay empty for log-det.
BudgetRow EvaluateBudget(const PemsProblem& problem, double budget,
                         Objective objective, const RowOptions& options);

std::string BudgetRowsCsv(const std::vector<BudgetRow>& rows);

enum class SweepMode { kPems, kPims };

struct ExperimentSpec {
  std::optional<std::string> instance_path;  // otherwise generate from template
  InstanceTemplate instance_template = InstanceTemplate::kSmall;
  SweepMode mode = SweepMode::kPems;
  Objective objective = Objective::kLogDet;
  std::optional<BudgetSweep> budgets;
  int replications = 1;
  uint64_t seed = 1;
  int grid_points = 33;
  int workers = 1;
  bool measure_error = false;  // feed grid-doubling error into the bounds
  int pims_first_time = 1;     // exact-measurement window for kPims
  int pims_last_time = 5;
};

// CSV text; identical for identical specs regardless of `workers`.
std::string RunSweep(const ExperimentSpec& spec);

}  // namespace epimeas

#endif  // EPIMEAS_EXPERIMENT_H_
