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

// Exact-measurement selection: pick the cheapest set of noiseless state
// measurements from which (beta, delta) is uniquely recoverable.

#ifndef EPIMEAS_PIMS_H_
#define EPIMEAS_PIMS_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epimeas/dynamics.h"
#include "epimeas/measurement.h"
#include "epimeas/network.h"

namespace epimeas {

// One scalar equation of the recursion: the x- or r-update of node `node`
// from step `time` to `time + 1`. Ordered by (time, node, kind).
struct EquationId {
  int time = 0;
  int node = 0;
  StateKind kind = StateKind::kInfected;

  auto operator<=>(const EquationId&) const = default;
};

std::string ToString(const EquationId& id);

class PimsInstance {
 public:
  // Throws ValidationError unless t1 < t2, on an initial condition violating
  // the model assumptions, or a candidate sample with no non-negative cost.
  PimsInstance(EpidemicNetwork network, InitialCondition initial,
               MeasurementCosts costs);

  const EpidemicNetwork& network() const { return network_; }
  const InitialCondition& initial() const { return initial_; }
  const DistanceProfile& profile() const { return profile_; }
  const MeasurementCosts& costs() const { return costs_; }
  int first_time() const { return costs_.first_time(); }
  int last_time() const { return costs_.last_time(); }

  bool IsCandidate(const MeasurementId& id) const;
  // Cost of a candidate sample; throws std::out_of_range otherwise.
  double Cost(const MeasurementId& id) const;

 private:
  EpidemicNetwork network_;
  InitialCondition initial_;
  MeasurementCosts costs_;
  DistanceProfile profile_;
};

// Samples in the window not forced to zero, sorted.
std::vector<MeasurementId> CandidateSet(const PimsInstance& instance);

struct EquationSets {
  std::vector<EquationId> infected;   // x-updates guaranteed informative
  std::vector<EquationId> recovered;  // r-updates guaranteed informative
};

EquationSets BuildEquationSets(const PimsInstance& instance);

// Non-zero samples an equation involves, sorted.
std::vector<MeasurementId> EquationSupport(const PimsInstance& instance,
                                           const EquationId& equation);

double StrategyCost(const PimsInstance& instance,
                    std::span<const MeasurementId> strategy);

struct PairStrategy {
  EquationId infected_equation;
  EquationId recovered_equation;
  std::vector<MeasurementId> measurements;  // sorted, no duplicates
  double cost = 0.0;
};

inline constexpr double kMaxEquationPairs = 1e7;

// Cheapest union of supports over all (x-equation, r-equation) pairs. Ties go
// to the lexicographically first (k1, i1, k2, i2). Throws InfeasibleError if
// either equation set is empty and GuardExceeded past kMaxEquationPairs.
PairStrategy SelectPairStrategy(const PimsInstance& instance);

// Two costs close enough to count as a tie in pair selection.
bool CostsTie(double a, double b);

// Cost bound of a co-timed pair: the minimum over x-equations (k, i) whose
// r-equation (k, i) is also informative of
//   b_{k+1,i} + b_{k,i} + c_{k+1,i} + sum over the closed neighborhood c_{k,j},
// where costs of zero-forced samples count as 0. +inf if no such equation.
double PairCostBound(const PimsInstance& instance);

// Smallest cost over candidate samples; +inf when there are none.
double MinCandidateCost(const PimsInstance& instance);

using MeasuredValues = std::map<MeasurementId, double>;

// Noiseless samples of the trajectory under `truth`.
MeasuredValues MeasureExactly(const PimsInstance& instance,
                              std::span<const MeasurementId> strategy,
                              Theta truth);

struct IdentificationResult {
  bool identified = false;  // rank 2
  int rank = 0;
  std::optional<Theta> estimate;
  double largest_singular_value = 0.0;
  double smallest_singular_value = 0.0;
  std::vector<EquationId> equations_used;
};

// Stacks every equation whose coefficients and right-hand side are fully
// determined by the samples (zero-forced states count as known) and solves
// the least-squares problem for theta. Throws ValidationError if a strategy
// entry is not a candidate or lacks a measured value.
IdentificationResult IdentifyTheta(const PimsInstance& instance,
                                   std::span<const MeasurementId> strategy,
                                   const MeasuredValues& values);

}  // namespace epimeas

#endif  // EPIMEAS_PIMS_H_
