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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "checks.h"
#include "epimeas/experiment.h"
#include "epimeas/oracle.h"
#include "epimeas/pems.h"
#include "epimeas/pims.h"
#include "test_support.h"

namespace epimeas {
namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome Fail(const std::string& detail) { return {false, detail}; }

// 1. Trajectory invariants on random instances.
Outcome DynamicsSuite() {
  for (uint64_t trial = 0; trial < 200; ++trial) {
    CounterRng rng(DeriveSeed(1001, trial));
    const int n = rng.UniformInt(1, 8);
    const ParameterBox box{rng.Uniform(0.5, 8.0), rng.Uniform(0.5, 4.0)};
    testing::RandomModel model = testing::MakeRandomModel(rng, n, box);
    const Theta theta{rng.Uniform(0.01, box.beta_max), rng.Uniform(0.01, box.delta_max)};
    const std::string err = testing::CheckTrajectoryProperties(
        model.network, model.initial, theta, rng.UniformInt(1, 50));
    if (!err.empty()) return Fail("instance " + std::to_string(trial) + ": " + err);
  }
  return {true, "200 instances"};
}

// 2. Recursion sensitivities against central differences.
Outcome SensitivityOracle() {
  for (uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng rng(DeriveSeed(1002, trial));
    const int n = rng.UniformInt(1, 8);
    testing::RandomModel model = testing::MakeRandomModel(rng, n, {8.0, 4.0});
    const Theta theta{rng.Uniform(0.5, 7.5), rng.Uniform(0.5, 3.5)};
    const std::string err = testing::CheckSensitivities(
        model.network, model.initial, theta, rng.UniformInt(1, 50), 1e-6, 1e-5, 1e-4);
    if (!err.empty()) return Fail("instance " + std::to_string(trial) + ": " + err);
  }
  return {true, "20 instances, step 1e-6, rel 1e-5"};
}

// 3. Exact recovery from the selected pair strategy.
Outcome PimsFeasibility() {
  double worst_ratio = 0.0;
  for (uint64_t trial = 0; trial < 50; ++trial) {
    CounterRng rng(DeriveSeed(1003, trial));
    const PimsInstance instance = testing::MakeSmallPimsInstance(rng);
    const std::string err = testing::CheckPimsRecovery(instance, rng, 20, 1e-8);
    if (!err.empty()) return Fail("instance " + std::to_string(trial) + ": " + err);
    worst_ratio = std::max(worst_ratio, SelectPairStrategy(instance).cost /
                                            PairCostBound(instance));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "50 instances x 20 draws, max cost/bound %.3f", worst_ratio);
  return {true, buf};
}

struct RatioStats {
  double min_ratio = INFINITY;
  double sum_ratio = 0.0;
  int rows = 0;
  std::vector<double> per_budget_sum;
  std::vector<int> per_budget_rows;
  int bound_failures = 0;
  std::string first_failure;
};

// 4. Greedy against brute force on the small template.
Outcome GreedyVsBruteForce() {
  constexpr int kReplications = 50;
  constexpr int kGrid = 33;
  constexpr uint64_t kSeed = 2020;
  const std::vector<double> budgets = DefaultBudgets(
      BuildPemsProblem(GenerateInstance(DeriveSeed(kSeed, 0), InstanceTemplate::kSmall), kGrid));
  RatioStats stats[2];
  for (auto& s : stats) {
    s.per_budget_sum.assign(budgets.size(), 0.0);
    s.per_budget_rows.assign(budgets.size(), 0);
  }
  double max_epsilon = 0.0;
  for (int r = 0; r < kReplications; ++r) {
    const PemsInstance instance =
        GenerateInstance(DeriveSeed(kSeed, r), InstanceTemplate::kSmall);
    const PemsProblem problem = BuildPemsProblem(instance, kGrid);
    std::vector<Selection> probes{Selection(problem.copies.size(), 0), problem.copies};
    for (size_t m = 0; m < problem.copies.size(); ++m) {
      Selection single(problem.copies.size(), 0);
      single[m] = 1;
      probes.push_back(std::move(single));
    }
    for (int o = 0; o < 2; ++o) {
      const Objective objective = o == 0 ? Objective::kLogDet : Objective::kTrace;
      const QuadratureError error = EstimateQuadratureError(instance, kGrid, probes, objective);
      max_epsilon = std::max(max_epsilon, error.objective);
      RowOptions options;
      options.epsilon = error.objective;
      options.matrix_epsilon = error.matrix;
      for (size_t b = 0; b < budgets.size(); ++b) {
        const BudgetRow row = EvaluateBudget(problem, budgets[b], objective, options);
        if (!row.opt_value || *row.opt_value <= 0.0) return Fail("oracle value missing");
        const double ratio = row.greedy_value / *row.opt_value;
        RatioStats& s = stats[o];
        s.min_ratio = std::min(s.min_ratio, ratio);
        s.sum_ratio += ratio;
        ++s.rows;
        s.per_budget_sum[b] += ratio;
        ++s.per_budget_rows[b];
        const PemsProblem restricted = RestrictToBudget(WithBudget(problem, budgets[b]));
        const double slack =
            GuaranteeSlack(objective, budgets[b], MinUnitCost(restricted),
                           MaxUnitCost(restricted), options.epsilon);
        const double floor = *row.guarantee_fraction * *row.opt_value - slack;
        if (row.greedy_value < floor - 1e-12) {
          if (s.bound_failures++ == 0) {
            s.first_failure = "replication " + std::to_string(r) + " B=" +
                              std::to_string(budgets[b]);
          }
        }
      }
    }
  }
  std::ostringstream detail;
  bool passed = true;
  const char* names[2] = {"d", "a"};
  for (int o = 0; o < 2; ++o) {
    const RatioStats& s = stats[o];
    const double mean = s.sum_ratio / s.rows;
    double worst_mean = INFINITY;
    for (size_t b = 0; b < budgets.size(); ++b) {
      worst_mean = std::min(worst_mean, s.per_budget_sum[b] / s.per_budget_rows[b]);
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%s: min ratio %.4f, mean ratio %.4f, worst per-B mean %.4f, bound misses %d; ",
                  names[o], s.min_ratio, mean, worst_mean, s.bound_failures);
    detail << buf;
    if (o == 0 && (s.min_ratio < 0.31 || worst_mean < 0.31)) passed = false;
    if (s.bound_failures > 0) {
      passed = false;
      detail << "(first miss " << s.first_failure << ") ";
    }
    if (mean < 0.9) passed = false;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max eps %.2e", max_epsilon);
  detail << buf;
  return {passed, detail.str()};
}

// 5. Exhaustive submodularity audits and ratio bounds on tiny instances.
Outcome SubmodularityAudits() {
  int checked_gamma = 0;
  for (uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng rng(DeriveSeed(1005, trial));
    const int time = rng.UniformInt(1, 5);
    // Two nodes, one time, two copies: eight ground elements.
    const PemsInstance instance =
        testing::MakeTinyPemsInstance(rng, 2, time, time, 2, rng.Uniform(0.2, 0.7));
    const PemsProblem problem = BuildPemsProblem(instance, 33);
    if (GroundSet(problem).size() > static_cast<size_t>(kMaxAuditGroundSet)) {
      return Fail("instance too large for the audit");
    }
    const SetFunction fd = ObjectiveFunction(problem, Objective::kLogDet);
    const AuditResult audit = AuditSubmodularity(problem, fd, 1e-9);
    if (!audit.passed) {
      return Fail("log-det audit failed on instance " + std::to_string(trial));
    }
    const PemsProblem restricted = RestrictToBudget(problem);
    const GreedyResult gd = RunGreedy(restricted, Objective::kLogDet);
    const double gamma_d =
        ExhaustiveGamma1(restricted, ObjectiveFunction(restricted, Objective::kLogDet), gd.trace);
    if (std::abs(gamma_d - 1.0) > 1e-9) {
      return Fail("log-det gamma1 " + std::to_string(gamma_d) + " on instance " +
                  std::to_string(trial));
    }
    const GreedyResult ga = RunGreedy(restricted, Objective::kTrace);
    const double gamma_a =
        ExhaustiveGamma1(restricted, ObjectiveFunction(restricted, Objective::kTrace), ga.trace);
    for (Gamma1Bound variant : {Gamma1Bound::kEigenRatio, Gamma1Bound::kWeylSplit}) {
      const double lb = Gamma1LowerBound(restricted, ga.trace, 0.0, variant).bound;
      if (lb > gamma_a + 1e-12) {
        return Fail("trace gamma1 bound " + std::to_string(lb) + " exceeds exhaustive " +
                    std::to_string(gamma_a));
      }
    }
    ++checked_gamma;
  }
  return {true, "20 instances, |ground set| = 8"};
}

// 6. Type-2 ratio estimate on the small template with exact quadrature.
Outcome Gamma2AboveOne() {
  constexpr int kReplications = 50;
  const uint64_t seed = 2020;
  std::vector<double> values;
  for (int r = 0; r < kReplications; ++r) {
    const PemsProblem problem = BuildPemsProblem(
        GenerateInstance(DeriveSeed(seed, r), InstanceTemplate::kSmall), 33);
    for (double budget : DefaultBudgets(problem)) {
      RowOptions options;
      options.oracle = false;
      const BudgetRow row = EvaluateBudget(problem, budget, Objective::kTrace, options);
      values.push_back(*row.gamma2_hat);
    }
  }
  std::sort(values.begin(), values.end());
  const int finite = static_cast<int>(
      std::count_if(values.begin(), values.end(), [](double v) { return std::isfinite(v); }));
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "%zu rows: min %.4f, median %.4f, max finite %.4f, infinite %zu", values.size(),
                values.front(), values[values.size() / 2],
                finite > 0 ? values[finite - 1] : NAN, values.size() - finite);
  return {values.front() > 1.0, buf};
}

// 7. Guarantee constants.
Outcome GuaranteeConstants() {
  const double d = GuaranteeFraction(Objective::kLogDet);
  const double a = GuaranteeFraction(Objective::kTrace, 0.3, 1.0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "d %.6f, a(0.3, 1) %.6f", d, a);
  const double d_ref = 0.5 * (1.0 - std::exp(-1.0));
  const double a_ref = 0.5 * (1.0 - std::exp(-0.3));
  return {std::abs(d - d_ref) < 1e-4 && std::abs(a - a_ref) < 1e-4 &&
              std::abs(d - 0.3161) < 1e-4 && std::abs(a - 0.1296) < 1e-4,
          buf};
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// 8. Byte-identical sweep output across runs and worker counts.
Outcome Reproducibility() {
  const std::string dir = std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp";
  const std::string base = std::string(EPIMEAS_CLI_PATH) +
                           " sweep --template small --objective a --replications 8"
                           " --seed 77 --grid-points 33 --measure-error";
  std::vector<std::string> outputs;
  int run = 0;
  for (int workers : {1, 1, 1, 8}) {
    const std::string path = dir + "/epimeas_accept_" + std::to_string(run++) + ".csv";
    const std::string command =
        base + " --workers " + std::to_string(workers) + " --out " + path;
    const int status = std::system(command.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return Fail("sweep exited abnormally");
    outputs.push_back(Slurp(path));
    std::remove(path.c_str());
  }
  for (const std::string& out : outputs) {
    if (out != outputs[0]) return Fail("outputs differ");
  }
  if (outputs[0].empty()) return Fail("empty output");
  return {true, "3 runs with 1 worker and 1 run with 8 workers, " +
                    std::to_string(outputs[0].size()) + " bytes each"};
}

struct Criterion {
  int number;
  const char* name;
  double time_limit;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace epimeas

int main() {
  using epimeas::Criterion;
  const std::vector<Criterion> criteria{
      {1, "dynamics property suite", 10.0, epimeas::DynamicsSuite},
      {2, "sensitivity oracle", 5.0, epimeas::SensitivityOracle},
      {3, "exact identification", 10.0, epimeas::PimsFeasibility},
      {4, "greedy vs brute force", 900.0, epimeas::GreedyVsBruteForce},
      {5, "submodularity audits", 300.0, epimeas::SubmodularityAudits},
      {6, "type-2 ratio above one", 900.0, epimeas::Gamma2AboveOne},
      {7, "guarantee constants", 1.0, epimeas::GuaranteeConstants},
      {8, "reproducibility", 900.0, epimeas::Reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = epimeas::Clock::now();
    epimeas::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = epimeas::Seconds(start);
    if (seconds > c.time_limit) {
      outcome.passed = false;
      outcome.detail += "; over time limit";
    }
    if (!outcome.passed) ++failures;
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", outcome.passed ? "PASS" : "FAIL",
                c.number, c.name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
