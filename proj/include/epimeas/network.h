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

#ifndef EPIMEAS_NETWORK_H_
#define EPIMEAS_NETWORK_H_

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace epimeas {

// Directed edge: `from` influences `to` with weight a_{to,from}. A self-loop
// has from == to. Nodes are 0-based in memory and 1-based on disk.
struct Edge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct Neighbor {
  int node = 0;
  double weight = 0.0;
};

// Weighted digraph plus the sampling step h of the discrete-time model.
// The constructor enforces structure only (ids in range, finite non-negative
// weights, no duplicate edges, h > 0). Model assumptions are checked by
// Validate().
class EpidemicNetwork {
 public:
  EpidemicNetwork(int num_nodes, std::vector<Edge> edges, double step);

  int num_nodes() const { return num_nodes_; }
  double step() const { return step_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // In-neighbors of `node`, self excluded, sorted by id.
  std::span<const Neighbor> in_neighbors(int node) const {
    return in_neighbors_[node];
  }
  bool has_self_loop(int node) const { return has_self_loop_[node]; }
  double self_weight(int node) const { return self_weight_[node]; }
  // a_ii plus the weights of all in-edges of `node`.
  double closed_in_weight(int node) const;
  // Row of the weight matrix: entry j is a_{node,j}.
  std::vector<double> weight_row(int node) const;

 private:
  int num_nodes_;
  double step_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> in_neighbors_;
  std::vector<bool> has_self_loop_;
  std::vector<double> self_weight_;
};

struct InitialCondition {
  std::vector<double> susceptible;
  std::vector<double> infected;
  std::vector<double> recovered;
};

// s = 1 - x and r = 0 for every node.
InitialCondition MakeInitialCondition(std::span<const double> infected);

// Upper ends of the parameter range that every simulated theta must lie in.
struct ParameterBox {
  double beta_max = 0.0;
  double delta_max = 0.0;
};

struct Violation {
  std::string assumption;  // "initial-condition", "step-size" or "weights"
  int node = -1;           // -1 when not tied to a node
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string Summary() const;
};

ValidationReport Validate(const EpidemicNetwork& network,
                          const InitialCondition& initial, ParameterBox box);

// Throws ValidationError carrying the report summary if Validate fails.
void ValidateOrThrow(const EpidemicNetwork& network,
                     const InitialCondition& initial, ParameterBox box);

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

inline bool IsReachable(int distance) { return distance != kUnreachable; }

// Hop distances from the initially infected set and the node classes used by
// the exact-measurement equation sets.
struct DistanceProfile {
  // Shortest hop count from any initially infected node, self-loops ignored.
  std::vector<int> distance;
  // min over in-neighbors (self excluded) of `distance`; kUnreachable if the
  // node has no in-neighbors or none of them is reachable.
  std::vector<int> nearest_in_neighbor;
  std::vector<bool> initially_infected;
  // Initially infected with a positive self-loop.
  std::vector<bool> self_sustaining;
  // Not self-sustaining but fed by some reachable in-neighbor.
  std::vector<bool> neighbor_driven;
};

DistanceProfile ComputeDistanceProfile(const EpidemicNetwork& network,
                                       const InitialCondition& initial);

}  // namespace epimeas

#endif  // EPIMEAS_NETWORK_H_
