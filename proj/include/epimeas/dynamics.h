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

#ifndef EPIMEAS_DYNAMICS_H_
#define EPIMEAS_DYNAMICS_H_

#include <string>
#include <vector>

#include "epimeas/network.h"

namespace epimeas {

// Infection rate beta and recovery rate delta.
struct Theta {
  double beta = 0.0;
  double delta = 0.0;
};

// The two measurable compartments.
enum class StateKind { kInfected, kRecovered };

char KindLetter(StateKind kind);

// Values over time steps 0..steps for every node.
class NodeSeries {
 public:
  NodeSeries() = default;
  NodeSeries(int steps, int num_nodes)
      : num_nodes_(num_nodes), values_((steps + 1) * num_nodes, 0.0) {}

  double operator()(int time, int node) const {
    return values_[time * num_nodes_ + node];
  }
  double& operator()(int time, int node) {
    return values_[time * num_nodes_ + node];
  }
  int steps() const {
    return num_nodes_ == 0 ? 0 : static_cast<int>(values_.size()) / num_nodes_ - 1;
  }
  int num_nodes() const { return num_nodes_; }

 private:
  int num_nodes_ = 0;
  std::vector<double> values_;
};

struct Trajectory {
  NodeSeries susceptible;
  NodeSeries infected;
  NodeSeries recovered;

  int steps() const { return infected.steps(); }
  int num_nodes() const { return infected.num_nodes(); }
  double value(int time, int node, StateKind kind) const {
    return kind == StateKind::kInfected ? infected(time, node)
                                        : recovered(time, node);
  }
};

// Trajectory plus the derivatives of every state with respect to theta.
struct SensitivityTrajectory {
  Trajectory states;
  NodeSeries ds_dbeta, ds_ddelta;
  NodeSeries dx_dbeta, dx_ddelta;
  NodeSeries dr_dbeta, dr_ddelta;

  // d(state)/d(beta), d(state)/d(delta) of a measurable state.
  double dbeta(int time, int node, StateKind kind) const {
    return kind == StateKind::kInfected ? dx_dbeta(time, node)
                                        : dr_dbeta(time, node);
  }
  double ddelta(int time, int node, StateKind kind) const {
    return kind == StateKind::kInfected ? dx_ddelta(time, node)
                                        : dr_ddelta(time, node);
  }
};

// Runs the discrete-time networked SIR recursion for `steps` steps. Validates
// the model assumptions with the box (theta.beta, theta.delta) first.
Trajectory Simulate(const EpidemicNetwork& network,
                    const InitialCondition& initial, Theta theta, int steps);

SensitivityTrajectory SimulateWithSensitivities(const EpidemicNetwork& network,
                                                const InitialCondition& initial,
                                                Theta theta, int steps);

// True iff the state is identically zero for every admissible theta, i.e.
// x_i[k] with k < d_i or r_i[k] with k <= d_i.
bool StateIsZero(const DistanceProfile& profile, int node, int time,
                 StateKind kind);

// CSV with header k,i,s,x,r (1-based node ids), preceded by the schema line.
std::string TrajectoryCsv(const Trajectory& trajectory);
// Same, with dx_dbeta,dx_ddelta,dr_dbeta,dr_ddelta columns appended.
std::string TrajectoryCsv(const SensitivityTrajectory& trajectory);

}  // namespace epimeas

#endif  // EPIMEAS_DYNAMICS_H_
