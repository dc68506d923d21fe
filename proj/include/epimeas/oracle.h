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

// Exhaustive reference solvers and property audits for small instances.
// Every routine refuses (GuardExceeded) rather than truncating its search.

#ifndef EPIMEAS_ORACLE_H_
#define EPIMEAS_ORACLE_H_

#include <functional>
#include <optional>
#include <vector>

#include "epimeas/pems.h"
#include "epimeas/pims.h"

namespace epimeas {

inline constexpr double kMaxPemsSearchSpace = 1e8;
inline constexpr int kMaxGamma1GroundSet = 12;
inline constexpr int kMaxAuditGroundSet = 8;

struct PemsOracleReport {
  double value = 0.0;
  Selection optimizer;
  double space_size = 0.0;  // prod over measurements of (copies + 1)
  double enumerated = 0.0;
  double seconds = 0.0;
};

// Maximizes the objective over every count vector within the copy caps and
// the budget. Enumeration is lexicographic in (node, time, kind, count); the
// first maximizer wins ties.
PemsOracleReport BruteForcePems(const PemsProblem& problem, Objective objective);

struct PimsOracleReport {
  double value = 0.0;
  EquationId infected_equation;
  EquationId recovered_equation;
  std::vector<MeasurementId> optimizer;
  double space_size = 0.0;  // |x-equations| * |r-equations|
  double seconds = 0.0;
};

// Re-derives the equation pairs and their supports from the distance profile
// and scans every pair.
PimsOracleReport BruteForcePimsPairs(const PimsInstance& instance);

using SetFunction = std::function<double(const Selection&)>;

// Type-1 greedy submodularity ratio of `f` along the chain of `trace`,
// measured over every subset of the ground set and capped at 1.
double ExhaustiveGamma1(const PemsProblem& problem, const SetFunction& f,
                        const GreedyTrace& trace);

struct AuditCounterexample {
  std::vector<GroundElement> smaller;  // A
  std::vector<GroundElement> larger;   // B, a superset of A
  GroundElement added;                 // y, not in B
  double violation = 0.0;              // amount by which the inequality fails
};

struct AuditResult {
  bool passed = true;
  std::optional<AuditCounterexample> counterexample;
  double checked = 0.0;  // number of inequalities evaluated
};

// Diminishing returns f(A + y) - f(A) >= f(B + y) - f(B) - tolerance for all
// A subset of B, y outside B.
AuditResult AuditSubmodularity(const PemsProblem& problem, const SetFunction& f,
                               double tolerance);

// f(A) <= f(B) + tolerance for all A subset of B. `added` of a counterexample
// is unused.
AuditResult AuditMonotonicity(const PemsProblem& problem, const SetFunction& f,
                              double tolerance);

// The objective as a set function over `problem`.
SetFunction ObjectiveFunction(const PemsProblem& problem, Objective objective);

}  // namespace epimeas

#endif  // EPIMEAS_ORACLE_H_
