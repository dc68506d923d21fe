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

#include "epimeas/oracle.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <set>
#include <string>

#include "epimeas/errors.h"

namespace epimeas {

namespace {

constexpr double kMinGain = 1e-14;

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string SizeText(double size) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", size);
  return buf;
}

// Subset of `ground` picked by `mask` as a count vector.
Selection MaskSelection(const PemsProblem& problem,
                        const std::vector<GroundElement>& ground, uint32_t mask) {
  Selection counts(problem.measurements.size(), 0);
  for (size_t e = 0; e < ground.size(); ++e) {
    if (mask & (1u << e)) ++counts[ground[e].measurement];
  }
  return counts;
}

std::vector<GroundElement> MaskElements(const std::vector<GroundElement>& ground,
                                        uint32_t mask) {
  std::vector<GroundElement> out;
  for (size_t e = 0; e < ground.size(); ++e) {
    if (mask & (1u << e)) out.push_back(ground[e]);
  }
  return out;
}

// f on every subset of the ground set, indexed by bitmask.
std::vector<double> TabulateSubsets(const PemsProblem& problem,
                                    const std::vector<GroundElement>& ground,
                                    const SetFunction& f) {
  std::vector<double> values(size_t{1} << ground.size());
  for (uint32_t mask = 0; mask < values.size(); ++mask) {
    values[mask] = f(MaskSelection(problem, ground, mask));
  }
  return values;
}

std::vector<GroundElement> AuditGround(const PemsProblem& problem) {
  std::vector<GroundElement> ground = GroundSet(problem);
  if (ground.size() > static_cast<size_t>(kMaxAuditGroundSet)) {
    throw GuardExceeded("audit ground set has " + std::to_string(ground.size()) +
                        " elements; limit is " + std::to_string(kMaxAuditGroundSet));
  }
  return ground;
}

}  // namespace

PemsOracleReport BruteForcePems(const PemsProblem& problem, Objective objective) {
  const auto start = std::chrono::steady_clock::now();
  const size_t count = problem.measurements.size();
  PemsOracleReport report;
  report.space_size = 1.0;
  for (int cap : problem.copies) report.space_size *= cap + 1.0;
  if (report.space_size > kMaxPemsSearchSpace) {
    throw GuardExceeded("selection lattice has " + SizeText(report.space_size) +
                        " points; limit is " + SizeText(kMaxPemsSearchSpace));
  }
  Selection counts(count, 0);
  report.optimizer = counts;
  report.value = -std::numeric_limits<double>::infinity();
  while (true) {
    report.enumerated += 1.0;
    if (WithinBudget(SelectionCost(problem, counts), problem.budget)) {
      const double value = Evaluate(problem, counts, objective);
      if (value > report.value) {
        report.value = value;
        report.optimizer = counts;
      }
    }
    // Odometer with the last measurement varying fastest.
    size_t digit = count;
    while (digit > 0) {
      --digit;
      if (counts[digit] < problem.copies[digit]) {
        ++counts[digit];
        break;
      }
      counts[digit] = 0;
      if (digit == 0) {
        digit = count + 1;
        break;
      }
    }
    if (digit == count + 1 || count == 0) break;
  }
  report.seconds = SecondsSince(start);
  return report;
}

PimsOracleReport BruteForcePimsPairs(const PimsInstance& instance) {
  const auto start = std::chrono::steady_clock::now();
  const EpidemicNetwork& net = instance.network();
  const DistanceProfile& p = instance.profile();
  std::vector<EquationId> x_equations;
  std::vector<EquationId> r_equations;
  for (int k = instance.first_time(); k < instance.last_time(); ++k) {
    for (int i = 0; i < net.num_nodes(); ++i) {
      int nearest = kUnreachable;
      for (const Neighbor& nb : net.in_neighbors(i)) {
        nearest = std::min(nearest, p.distance[nb.node]);
      }
      const bool seeded_loop = p.distance[i] == 0 && net.self_weight(i) > 0.0;
      if (seeded_loop || (nearest != kUnreachable && k >= nearest)) {
        x_equations.push_back({k, i, StateKind::kInfected});
      }
      if (p.distance[i] != kUnreachable && k >= p.distance[i]) {
        r_equations.push_back({k, i, StateKind::kRecovered});
      }
    }
  }
  PimsOracleReport report;
  report.space_size =
      static_cast<double>(x_equations.size()) * static_cast<double>(r_equations.size());
  if (report.space_size > kMaxEquationPairs) {
    throw GuardExceeded("equation pair space has " + SizeText(report.space_size) +
                        " pairs; limit is " + SizeText(kMaxEquationPairs));
  }
  if (report.space_size == 0.0) {
    throw InfeasibleError("no equation pair exists in the window");
  }
  auto support = [&](const EquationId& eq) {
    std::set<MeasurementId> out;
    const int i = eq.node;
    const int k = eq.time;
    const StateKind x = StateKind::kInfected;
    const StateKind r = StateKind::kRecovered;
    std::vector<MeasurementId> involved;
    if (eq.kind == x) {
      involved = {{i, k + 1, x}, {i, k, r}, {i, k, x}};
      for (const Neighbor& nb : net.in_neighbors(i)) involved.push_back({nb.node, k, x});
    } else {
      involved = {{i, k + 1, r}, {i, k, r}, {i, k, x}};
    }
    for (const MeasurementId& id : involved) {
      if (instance.IsCandidate(id)) out.insert(id);
    }
    return out;
  };
  report.value = std::numeric_limits<double>::infinity();
  for (const EquationId& xe : x_equations) {
    const std::set<MeasurementId> xs = support(xe);
    for (const EquationId& re : r_equations) {
      std::set<MeasurementId> all = xs;
      all.merge(support(re));
      double cost = 0.0;
      for (const MeasurementId& id : all) cost += instance.Cost(id);
      if (cost < report.value && !CostsTie(cost, report.value)) {
        report.value = cost;
        report.infected_equation = xe;
        report.recovered_equation = re;
        report.optimizer.assign(all.begin(), all.end());
      }
    }
  }
  report.seconds = SecondsSince(start);
  return report;
}

double ExhaustiveGamma1(const PemsProblem& problem, const SetFunction& f,
                        const GreedyTrace& trace) {
  const std::vector<GroundElement> ground = GroundSet(problem);
  if (ground.size() > static_cast<size_t>(kMaxGamma1GroundSet)) {
    throw GuardExceeded("gamma1 ground set has " + std::to_string(ground.size()) +
                        " elements; limit is " + std::to_string(kMaxGamma1GroundSet));
  }
  const std::vector<double> values = TabulateSubsets(problem, ground, f);
  auto bit_of = [&](const GroundElement& e) {
    const auto it = std::find(ground.begin(), ground.end(), e);
    if (it == ground.end()) throw PreconditionError("chain element outside the ground set");
    return 1u << (it - ground.begin());
  };
  const uint32_t full = static_cast<uint32_t>(values.size() - 1);
  double gamma = 1.0;
  uint32_t prefix = 0;
  for (size_t j = 0; j <= trace.chain.size(); ++j) {
    if (j > 0) prefix |= bit_of(trace.chain[j - 1]);
    const double base = values[prefix];
    const uint32_t rest = full & ~prefix;
    // Enumerate nonempty subsets T of the complement of the prefix.
    for (uint32_t t = rest; t != 0; t = (t - 1) & rest) {
      const double gain = values[prefix | t] - base;
      if (!(gain > kMinGain)) continue;
      double singles = 0.0;
      for (size_t e = 0; e < ground.size(); ++e) {
        if (t & (1u << e)) singles += values[prefix | (1u << e)] - base;
      }
      gamma = std::min(gamma, singles / gain);
    }
  }
  return gamma;
}

AuditResult AuditSubmodularity(const PemsProblem& problem, const SetFunction& f,
                               double tolerance) {
  const std::vector<GroundElement> ground = AuditGround(problem);
  const std::vector<double> values = TabulateSubsets(problem, ground, f);
  const uint32_t full = static_cast<uint32_t>(values.size() - 1);
  AuditResult result;
  for (uint32_t larger = 0; larger <= full; ++larger) {
    // Every submask of `larger`, including the empty set.
    for (uint32_t smaller = larger;; smaller = (smaller - 1) & larger) {
      for (size_t e = 0; e < ground.size(); ++e) {
        const uint32_t y = 1u << e;
        if (larger & y) continue;
        result.checked += 1.0;
        const double small_gain = values[smaller | y] - values[smaller];
        const double large_gain = values[larger | y] - values[larger];
        const double violation = large_gain - small_gain;
        if (violation > tolerance &&
            (!result.counterexample || violation > result.counterexample->violation)) {
          result.passed = false;
          result.counterexample = AuditCounterexample{
              MaskElements(ground, smaller), MaskElements(ground, larger), ground[e],
              violation};
        }
      }
      if (smaller == 0) break;
    }
  }
  return result;
}

AuditResult AuditMonotonicity(const PemsProblem& problem, const SetFunction& f,
                              double tolerance) {
  const std::vector<GroundElement> ground = AuditGround(problem);
  const std::vector<double> values = TabulateSubsets(problem, ground, f);
  const uint32_t full = static_cast<uint32_t>(values.size() - 1);
  AuditResult result;
  for (uint32_t larger = 0; larger <= full; ++larger) {
    for (uint32_t smaller = larger;; smaller = (smaller - 1) & larger) {
      result.checked += 1.0;
      const double violation = values[smaller] - values[larger];
      if (violation > tolerance &&
          (!result.counterexample || violation > result.counterexample->violation)) {
        result.passed = false;
        result.counterexample = AuditCounterexample{
            MaskElements(ground, smaller), MaskElements(ground, larger), {}, violation};
      }
      if (smaller == 0) break;
    }
  }
  return result;
}

SetFunction ObjectiveFunction(const PemsProblem& problem, Objective objective) {
  return [&problem, objective](const Selection& counts) {
    return Evaluate(problem, counts, objective);
  };
}

}  // namespace epimeas
