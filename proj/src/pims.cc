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

#include "epimeas/pims.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "epimeas/errors.h"

namespace epimeas {

namespace {

constexpr double kRankTolerance = 1e-9;
constexpr double kTieTolerance = 1e-12;

// Givens-rotation least squares for two unknowns. Keeps the upper
// triangular factor R and Q^T b of the rows added so far.
class TwoColumnLeastSquares {
 public:
  void AddRow(double a1, double a2, double rhs) {
    if (a1 != 0.0) {
      const double norm = std::hypot(r11_, a1);
      const double c = r11_ / norm;
      const double s = a1 / norm;
      r11_ = norm;
      const double r12 = c * r12_ + s * a2;
      a2 = -s * r12_ + c * a2;
      r12_ = r12;
      const double b1 = c * b1_ + s * rhs;
      rhs = -s * b1_ + c * rhs;
      b1_ = b1;
    }
    if (a2 != 0.0) {
      const double norm = std::hypot(r22_, a2);
      b2_ = (r22_ * b2_ + a2 * rhs) / norm;
      r22_ = norm;
    }
  }

  // Singular values of R, which equal those of the stacked matrix.
  std::pair<double, double> SingularValues() const {
    const double plus = std::hypot(r11_ + r22_, r12_);
    const double minus = std::hypot(r11_ - r22_, r12_);
    const double largest = 0.5 * (plus + minus);
    if (largest == 0.0) return {0.0, 0.0};
    return {largest, std::abs(r11_ * r22_) / largest};
  }

  Theta Solve() const {
    const double delta = b2_ / r22_;
    return {(b1_ - r12_ * delta) / r11_, delta};
  }

 private:
  double r11_ = 0.0, r12_ = 0.0, r22_ = 0.0;
  double b1_ = 0.0, b2_ = 0.0;
};

// Cost of a sample if it is a candidate, 0 if it is forced to zero.
double CostOrZero(const PimsInstance& instance, const MeasurementId& id) {
  return instance.IsCandidate(id) ? instance.Cost(id) : 0.0;
}

void AddIfCandidate(const PimsInstance& instance, const MeasurementId& id,
                    std::vector<MeasurementId>& out) {
  if (instance.IsCandidate(id)) out.push_back(id);
}

}  // namespace

std::string ToString(const EquationId& id) {
  return std::string(1, KindLetter(id.kind)) + std::to_string(id.node + 1) + "[" +
         std::to_string(id.time) + "]";
}

PimsInstance::PimsInstance(EpidemicNetwork network, InitialCondition initial,
                           MeasurementCosts costs)
    : network_(std::move(network)),
      initial_(std::move(initial)),
      costs_(std::move(costs)) {
  if (costs_.num_nodes() != network_.num_nodes()) {
    throw ValidationError("cost table size does not match the network");
  }
  if (costs_.first_time() >= costs_.last_time()) {
    throw ValidationError("exact-measurement window needs t1 < t2");
  }
  ValidateOrThrow(network_, initial_, {0.0, 0.0});
  profile_ = ComputeDistanceProfile(network_, initial_);
  for (const MeasurementId& id : CandidateSet(*this)) {
    if (!costs_.Get(id.time, id.node, id.kind).has_value()) {
      throw ValidationError("missing cost for candidate " + ToString(id));
    }
  }
}

bool PimsInstance::IsCandidate(const MeasurementId& id) const {
  return id.time >= first_time() && id.time <= last_time() && id.node >= 0 &&
         id.node < network_.num_nodes() &&
         !StateIsZero(profile_, id.node, id.time, id.kind);
}

double PimsInstance::Cost(const MeasurementId& id) const {
  if (!IsCandidate(id)) throw std::out_of_range("not a candidate sample");
  return *costs_.Get(id.time, id.node, id.kind);
}

std::vector<MeasurementId> CandidateSet(const PimsInstance& instance) {
  std::vector<MeasurementId> out;
  for (int i = 0; i < instance.network().num_nodes(); ++i) {
    for (int k = instance.first_time(); k <= instance.last_time(); ++k) {
      for (StateKind kind : {StateKind::kInfected, StateKind::kRecovered}) {
        AddIfCandidate(instance, {i, k, kind}, out);
      }
    }
  }
  return out;
}

EquationSets BuildEquationSets(const PimsInstance& instance) {
  const DistanceProfile& p = instance.profile();
  EquationSets sets;
  for (int k = instance.first_time(); k < instance.last_time(); ++k) {
    for (int i = 0; i < instance.network().num_nodes(); ++i) {
      if (p.self_sustaining[i] ||
          (p.neighbor_driven[i] && k >= p.nearest_in_neighbor[i])) {
        sets.infected.push_back({k, i, StateKind::kInfected});
      }
      if (IsReachable(p.distance[i]) && k >= p.distance[i]) {
        sets.recovered.push_back({k, i, StateKind::kRecovered});
      }
    }
  }
  return sets;
}

std::vector<MeasurementId> EquationSupport(const PimsInstance& instance,
                                           const EquationId& eq) {
  std::vector<MeasurementId> out;
  const int i = eq.node;
  const int k = eq.time;
  if (eq.kind == StateKind::kInfected) {
    AddIfCandidate(instance, {i, k + 1, StateKind::kInfected}, out);
    AddIfCandidate(instance, {i, k, StateKind::kRecovered}, out);
    AddIfCandidate(instance, {i, k, StateKind::kInfected}, out);
    for (const Neighbor& nb : instance.network().in_neighbors(i)) {
      AddIfCandidate(instance, {nb.node, k, StateKind::kInfected}, out);
    }
  } else {
    AddIfCandidate(instance, {i, k + 1, StateKind::kRecovered}, out);
    AddIfCandidate(instance, {i, k, StateKind::kRecovered}, out);
    AddIfCandidate(instance, {i, k, StateKind::kInfected}, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double StrategyCost(const PimsInstance& instance,
                    std::span<const MeasurementId> strategy) {
  double total = 0.0;
  for (const MeasurementId& id : strategy) total += instance.Cost(id);
  return total;
}

bool CostsTie(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
  return std::abs(a - b) <=
         kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

PairStrategy SelectPairStrategy(const PimsInstance& instance) {
  const EquationSets sets = BuildEquationSets(instance);
  if (sets.infected.empty() || sets.recovered.empty()) {
    throw InfeasibleError("no informative x-equation or r-equation in window");
  }
  if (static_cast<double>(sets.infected.size()) *
          static_cast<double>(sets.recovered.size()) >
      kMaxEquationPairs) {
    throw GuardExceeded("equation pair count exceeds the scan limit");
  }
  std::vector<std::vector<MeasurementId>> r_supports;
  r_supports.reserve(sets.recovered.size());
  for (const EquationId& eq : sets.recovered) {
    r_supports.push_back(EquationSupport(instance, eq));
  }
  PairStrategy best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<MeasurementId> merged;
  for (const EquationId& x_eq : sets.infected) {
    const std::vector<MeasurementId> x_support = EquationSupport(instance, x_eq);
    for (size_t r = 0; r < sets.recovered.size(); ++r) {
      merged.clear();
      std::set_union(x_support.begin(), x_support.end(), r_supports[r].begin(),
                     r_supports[r].end(), std::back_inserter(merged));
      const double cost = StrategyCost(instance, merged);
      if (cost < best.cost && !CostsTie(cost, best.cost)) {
        best = {x_eq, sets.recovered[r], merged, cost};
      }
    }
  }
  return best;
}

double PairCostBound(const PimsInstance& instance) {
  const EquationSets sets = BuildEquationSets(instance);
  const DistanceProfile& p = instance.profile();
  double best = std::numeric_limits<double>::infinity();
  for (const EquationId& eq : sets.infected) {
    const int i = eq.node;
    const int k = eq.time;
    if (!IsReachable(p.distance[i]) || k < p.distance[i]) continue;
    double total = CostOrZero(instance, {i, k + 1, StateKind::kRecovered}) +
                   CostOrZero(instance, {i, k, StateKind::kRecovered}) +
                   CostOrZero(instance, {i, k + 1, StateKind::kInfected}) +
                   CostOrZero(instance, {i, k, StateKind::kInfected});
    for (const Neighbor& nb : instance.network().in_neighbors(i)) {
      total += CostOrZero(instance, {nb.node, k, StateKind::kInfected});
    }
    best = std::min(best, total);
  }
  return best;
}

double MinCandidateCost(const PimsInstance& instance) {
  double best = std::numeric_limits<double>::infinity();
  for (const MeasurementId& id : CandidateSet(instance)) {
    best = std::min(best, instance.Cost(id));
  }
  return best;
}

MeasuredValues MeasureExactly(const PimsInstance& instance,
                              std::span<const MeasurementId> strategy,
                              Theta truth) {
  const Trajectory traj = Simulate(instance.network(), instance.initial(),
                                   truth, instance.last_time());
  MeasuredValues values;
  for (const MeasurementId& id : strategy) {
    values[id] = traj.value(id.time, id.node, id.kind);
  }
  return values;
}

IdentificationResult IdentifyTheta(const PimsInstance& instance,
                                   std::span<const MeasurementId> strategy,
                                   const MeasuredValues& values) {
  const std::set<MeasurementId> selected(strategy.begin(), strategy.end());
  for (const MeasurementId& id : selected) {
    if (!instance.IsCandidate(id)) {
      throw ValidationError(ToString(id) + " is not a candidate sample");
    }
    if (!values.contains(id)) {
      throw ValidationError("no measured value for " + ToString(id));
    }
  }
  auto known = [&](int node, int time, StateKind kind) -> std::optional<double> {
    if (StateIsZero(instance.profile(), node, time, kind)) return 0.0;
    const MeasurementId id{node, time, kind};
    if (selected.contains(id)) return values.at(id);
    return std::nullopt;
  };

  const EpidemicNetwork& net = instance.network();
  const double h = net.step();
  TwoColumnLeastSquares solver;
  IdentificationResult result;
  for (int k = instance.first_time(); k < instance.last_time(); ++k) {
    for (int i = 0; i < net.num_nodes(); ++i) {
      const auto x_now = known(i, k, StateKind::kInfected);
      const auto x_next = known(i, k + 1, StateKind::kInfected);
      const auto r_now = known(i, k, StateKind::kRecovered);
      const auto r_next = known(i, k + 1, StateKind::kRecovered);

      // x-update: h*[s*pressure, -x] * theta = x[k+1] - x[k].
      if (x_now && x_next) {
        std::optional<double> pressure = net.self_weight(i) * *x_now;
        for (const Neighbor& nb : net.in_neighbors(i)) {
          const auto xj = known(nb.node, k, StateKind::kInfected);
          if (!xj) {
            pressure.reset();
            break;
          }
          *pressure += nb.weight * *xj;
        }
        if (pressure && (*pressure == 0.0 || r_now)) {
          const double s = *pressure == 0.0 ? 0.0 : 1.0 - *x_now - *r_now;
          const double a1 = h * s * *pressure;
          const double a2 = -h * *x_now;
          if (a1 != 0.0 || a2 != 0.0) {
            solver.AddRow(a1, a2, *x_next - *x_now);
            result.equations_used.push_back({k, i, StateKind::kInfected});
          }
        }
      }
      // r-update: h*[0, x] * theta = r[k+1] - r[k].
      if (x_now && r_now && r_next && *x_now != 0.0) {
        solver.AddRow(0.0, h * *x_now, *r_next - *r_now);
        result.equations_used.push_back({k, i, StateKind::kRecovered});
      }
    }
  }
  const auto [largest, smallest] = solver.SingularValues();
  result.largest_singular_value = largest;
  result.smallest_singular_value = smallest;
  if (largest > 0.0) result.rank = 1;
  if (largest > 0.0 && smallest > kRankTolerance * largest) result.rank = 2;
  result.identified = result.rank == 2;
  if (result.identified) result.estimate = solver.Solve();
  return result;
}

}  // namespace epimeas
