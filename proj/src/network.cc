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

#include "epimeas/network.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <utility>

#include "epimeas/errors.h"

namespace epimeas {

namespace {

constexpr double kSumTolerance = 1e-12;

}  // namespace

EpidemicNetwork::EpidemicNetwork(int num_nodes, std::vector<Edge> edges,
                                 double step)
    : num_nodes_(num_nodes),
      step_(step),
      edges_(std::move(edges)),
      in_neighbors_(num_nodes > 0 ? num_nodes : 0),
      has_self_loop_(num_nodes > 0 ? num_nodes : 0, false),
      self_weight_(num_nodes > 0 ? num_nodes : 0, 0.0) {
  if (num_nodes_ < 1) throw ValidationError("network needs at least one node");
  if (!std::isfinite(step_) || step_ <= 0.0) {
    throw ValidationError("step h must be positive and finite");
  }
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= num_nodes_ || e.to < 0 || e.to >= num_nodes_) {
      throw ValidationError("edge endpoint out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw ValidationError("edge weight must be finite and non-negative");
    }
    if (!seen.insert({e.from, e.to}).second) {
      throw ValidationError("duplicate edge");
    }
    if (e.from == e.to) {
      has_self_loop_[e.to] = true;
      self_weight_[e.to] = e.weight;
    } else {
      in_neighbors_[e.to].push_back({e.from, e.weight});
    }
  }
  for (auto& list : in_neighbors_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

double EpidemicNetwork::closed_in_weight(int node) const {
  double total = self_weight_[node];
  for (const Neighbor& nb : in_neighbors_[node]) total += nb.weight;
  return total;
}

std::vector<double> EpidemicNetwork::weight_row(int node) const {
  std::vector<double> row(num_nodes_, 0.0);
  row[node] = self_weight_[node];
  for (const Neighbor& nb : in_neighbors_[node]) row[nb.node] = nb.weight;
  return row;
}

InitialCondition MakeInitialCondition(std::span<const double> infected) {
  InitialCondition init;
  init.infected.assign(infected.begin(), infected.end());
  init.susceptible.resize(infected.size());
  init.recovered.assign(infected.size(), 0.0);
  for (size_t i = 0; i < infected.size(); ++i) {
    init.susceptible[i] = 1.0 - infected[i];
  }
  return init;
}

std::string ValidationReport::Summary() const {
  std::ostringstream out;
  for (size_t v = 0; v < violations.size(); ++v) {
    if (v > 0) out << "; ";
    const Violation& item = violations[v];
    out << item.assumption << ": " << item.message;
    if (item.node >= 0) out << " (node " << item.node + 1 << ")";
    out << " [value " << item.value << "]";
  }
  return out.str();
}

ValidationReport Validate(const EpidemicNetwork& network,
                          const InitialCondition& initial, ParameterBox box) {
  ValidationReport report;
  auto add = [&](const char* assumption, int node, double value,
                 std::string message) {
    report.violations.push_back({assumption, node, value, std::move(message)});
  };
  const int n = network.num_nodes();
  const size_t expected = static_cast<size_t>(n);
  if (initial.susceptible.size() != expected ||
      initial.infected.size() != expected ||
      initial.recovered.size() != expected) {
    add("initial-condition", -1, static_cast<double>(initial.infected.size()),
        "state vectors must have one entry per node");
    return report;
  }
  for (int i = 0; i < n; ++i) {
    const double s = initial.susceptible[i];
    const double x = initial.infected[i];
    const double r = initial.recovered[i];
    if (!(s > 0.0 && s <= 1.0)) add("initial-condition", i, s, "s_i[0] in (0,1] fails");
    if (!(x >= 0.0 && x < 1.0)) add("initial-condition", i, x, "x_i[0] in [0,1) fails");
    if (r != 0.0) add("initial-condition", i, r, "r_i[0]=0 fails");
    if (std::abs(s + x - 1.0) > kSumTolerance) {
      add("initial-condition", i, s + x, "s_i[0]+x_i[0]=1 fails");
    }
  }
  const double h = network.step();
  if (!(box.beta_max >= 0.0) || !(box.delta_max >= 0.0)) {
    add("step-size", -1, std::min(box.beta_max, box.delta_max),
        "parameter bounds must be non-negative");
  }
  if (!(h * box.delta_max < 1.0)) {
    add("step-size", -1, h * box.delta_max, "hδ<1 fails");
  }
  for (int i = 0; i < n; ++i) {
    const double load = h * box.beta_max * network.closed_in_weight(i);
    if (!(load < 1.0)) add("step-size", i, load, "hβΣa<1 fails");
  }
  for (const Edge& e : network.edges()) {
    if (e.weight > 0.0) continue;
    if (e.from != e.to) {
      add("weights", e.to, e.weight, "off-diagonal edge weight must be positive");
    } else {
      add("weights", e.to, e.weight, "listed self-loop must have positive weight");
    }
  }
  return report;
}

void ValidateOrThrow(const EpidemicNetwork& network,
                     const InitialCondition& initial, ParameterBox box) {
  ValidationReport report = Validate(network, initial, box);
  if (!report.ok()) throw ValidationError(report.Summary());
}

DistanceProfile ComputeDistanceProfile(const EpidemicNetwork& network,
                                       const InitialCondition& initial) {
  const int n = network.num_nodes();
  if (initial.infected.size() != static_cast<size_t>(n)) {
    throw ValidationError("initial condition size does not match network");
  }
  std::vector<std::vector<int>> out_neighbors(n);
  for (int i = 0; i < n; ++i) {
    for (const Neighbor& nb : network.in_neighbors(i)) {
      out_neighbors[nb.node].push_back(i);
    }
  }
  DistanceProfile profile;
  profile.distance.assign(n, kUnreachable);
  profile.initially_infected.assign(n, false);
  std::deque<int> frontier;
  for (int i = 0; i < n; ++i) {
    if (initial.infected[i] > 0.0) {
      profile.initially_infected[i] = true;
      profile.distance[i] = 0;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int v : out_neighbors[u]) {
      if (profile.distance[v] == kUnreachable) {
        profile.distance[v] = profile.distance[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  profile.nearest_in_neighbor.assign(n, kUnreachable);
  profile.self_sustaining.assign(n, false);
  profile.neighbor_driven.assign(n, false);
  for (int i = 0; i < n; ++i) {
    for (const Neighbor& nb : network.in_neighbors(i)) {
      profile.nearest_in_neighbor[i] =
          std::min(profile.nearest_in_neighbor[i], profile.distance[nb.node]);
    }
    profile.self_sustaining[i] =
        profile.initially_infected[i] && network.self_weight(i) > 0.0;
    profile.neighbor_driven[i] = !profile.self_sustaining[i] &&
                                 IsReachable(profile.nearest_in_neighbor[i]);
  }
  return profile;
}

}  // namespace epimeas
