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

#include "epimeas/dynamics.h"

#include <sstream>

#include "epimeas/csv.h"
#include "epimeas/errors.h"

namespace epimeas {

namespace {

// Sum over the closed in-neighborhood of weight times series value.
double ClosedSum(const EpidemicNetwork& network, const NodeSeries& series,
                 int time, int node) {
  double total = network.self_weight(node) * series(time, node);
  for (const Neighbor& nb : network.in_neighbors(node)) {
    total += nb.weight * series(time, nb.node);
  }
  return total;
}

void CheckInputs(const EpidemicNetwork& network, const InitialCondition& initial,
                 Theta theta, int steps) {
  if (steps < 0) throw ValidationError("number of steps must be non-negative");
  if (!(theta.beta >= 0.0) || !(theta.delta >= 0.0)) {
    throw ValidationError("theta must be non-negative");
  }
  ValidateOrThrow(network, initial, {theta.beta, theta.delta});
}

Trajectory InitialTrajectory(const InitialCondition& initial, int steps,
                             int n) {
  Trajectory traj{NodeSeries(steps, n), NodeSeries(steps, n),
                  NodeSeries(steps, n)};
  for (int i = 0; i < n; ++i) {
    traj.susceptible(0, i) = initial.susceptible[i];
    traj.infected(0, i) = initial.infected[i];
    traj.recovered(0, i) = initial.recovered[i];
  }
  return traj;
}

void Step(const EpidemicNetwork& network, Theta theta, int k,
          Trajectory& traj) {
  const double h = network.step();
  for (int i = 0; i < network.num_nodes(); ++i) {
    const double s = traj.susceptible(k, i);
    const double x = traj.infected(k, i);
    const double infection = h * s * theta.beta * ClosedSum(network, traj.infected, k, i);
    const double recovery = h * theta.delta * x;
    traj.susceptible(k + 1, i) = s - infection;
    traj.infected(k + 1, i) = x - recovery + infection;
    traj.recovered(k + 1, i) = traj.recovered(k, i) + recovery;
  }
}

}  // namespace

char KindLetter(StateKind kind) {
  return kind == StateKind::kInfected ? 'x' : 'r';
}

Trajectory Simulate(const EpidemicNetwork& network,
                    const InitialCondition& initial, Theta theta, int steps) {
  CheckInputs(network, initial, theta, steps);
  Trajectory traj = InitialTrajectory(initial, steps, network.num_nodes());
  for (int k = 0; k < steps; ++k) Step(network, theta, k, traj);
  return traj;
}

SensitivityTrajectory SimulateWithSensitivities(const EpidemicNetwork& network,
                                                const InitialCondition& initial,
                                                Theta theta, int steps) {
  CheckInputs(network, initial, theta, steps);
  const int n = network.num_nodes();
  const double h = network.step();
  SensitivityTrajectory out{InitialTrajectory(initial, steps, n),
                            NodeSeries(steps, n), NodeSeries(steps, n),
                            NodeSeries(steps, n), NodeSeries(steps, n),
                            NodeSeries(steps, n), NodeSeries(steps, n)};
  Trajectory& traj = out.states;
  // Initial states do not depend on theta, so all derivatives start at zero.
  for (int k = 0; k < steps; ++k) {
    for (int i = 0; i < n; ++i) {
      const double s = traj.susceptible(k, i);
      const double x = traj.infected(k, i);
      const double pressure = ClosedSum(network, traj.infected, k, i);
      const double dpressure_db = ClosedSum(network, out.dx_dbeta, k, i);
      const double dpressure_dd = ClosedSum(network, out.dx_ddelta, k, i);
      const double ds_db = out.ds_dbeta(k, i);
      const double ds_dd = out.ds_ddelta(k, i);

      // Derivatives of the infection flow h*s*beta*pressure.
      const double dflow_db =
          h * (ds_db * theta.beta + s) * pressure + h * s * theta.beta * dpressure_db;
      const double dflow_dd =
          h * theta.beta * (ds_dd * pressure + s * dpressure_dd);

      out.ds_dbeta(k + 1, i) = ds_db - dflow_db;
      out.ds_ddelta(k + 1, i) = ds_dd - dflow_dd;
      out.dx_dbeta(k + 1, i) =
          (1.0 - h * theta.delta) * out.dx_dbeta(k, i) + dflow_db;
      out.dx_ddelta(k + 1, i) =
          -h * x + (1.0 - h * theta.delta) * out.dx_ddelta(k, i) + dflow_dd;
      out.dr_dbeta(k + 1, i) =
          out.dr_dbeta(k, i) + h * theta.delta * out.dx_dbeta(k, i);
      out.dr_ddelta(k + 1, i) =
          out.dr_ddelta(k, i) + h * x + h * theta.delta * out.dx_ddelta(k, i);
    }
    Step(network, theta, k, traj);
  }
  return out;
}

bool StateIsZero(const DistanceProfile& profile, int node, int time,
                 StateKind kind) {
  const int d = profile.distance[node];
  if (!IsReachable(d)) return true;
  return kind == StateKind::kInfected ? time < d : time <= d;
}

namespace {

std::string Csv(const Trajectory& traj, const SensitivityTrajectory* sens) {
  std::ostringstream out;
  out << kSchemaLine << "k,i,s,x,r";
  if (sens != nullptr) out << ",dx_dbeta,dx_ddelta,dr_dbeta,dr_ddelta";
  out << '\n';
  for (int k = 0; k <= traj.steps(); ++k) {
    for (int i = 0; i < traj.num_nodes(); ++i) {
      out << k << ',' << i + 1 << ',' << FormatDouble(traj.susceptible(k, i))
          << ',' << FormatDouble(traj.infected(k, i)) << ','
          << FormatDouble(traj.recovered(k, i));
      if (sens != nullptr) {
        out << ',' << FormatDouble(sens->dx_dbeta(k, i)) << ','
            << FormatDouble(sens->dx_ddelta(k, i)) << ','
            << FormatDouble(sens->dr_dbeta(k, i)) << ','
            << FormatDouble(sens->dr_ddelta(k, i));
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

std::string TrajectoryCsv(const Trajectory& trajectory) {
  return Csv(trajectory, nullptr);
}

std::string TrajectoryCsv(const SensitivityTrajectory& trajectory) {
  return Csv(trajectory.states, &trajectory);
}

}  // namespace epimeas
