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

#include "epimeas/bayes.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "epimeas/errors.h"
#include "epimeas/parallel.h"

namespace epimeas {

namespace {

// Grid nodes per reduction chunk. Fixed so the summation order never depends
// on the worker count.
constexpr size_t kChunk = 64;

double Batch(const SamplingModel& model, const MeasurementId& m) {
  return m.kind == StateKind::kInfected ? model.infected_batch[m.node]
                                        : model.recovered_batch[m.node];
}

int LastTime(std::span<const MeasurementId> measurements) {
  int last = 0;
  for (const MeasurementId& m : measurements) last = std::max(last, m.time);
  return last;
}

// Fisher information of one binomial sample batch at one theta, unweighted.
InfoMatrix SampleInformation(const SamplingModel& model,
                             const SensitivityTrajectory& traj,
                             const MeasurementId& m) {
  const double v = traj.states.value(m.time, m.node, m.kind);
  if (v == 0.0) return {};
  if (v >= 1.0 - kSaturationMargin) {
    throw ValidationError("state " + ToString(m) +
                          " saturates at a grid node; its information is unbounded");
  }
  const double scale = Batch(model, m) / (v * (1.0 - v));
  return scale * InfoMatrix::Outer(traj.dbeta(m.time, m.node, m.kind),
                                   traj.ddelta(m.time, m.node, m.kind));
}

void CheckModel(const SamplingModel& model,
                std::span<const MeasurementId> measurements) {
  if (model.network == nullptr || model.initial == nullptr) {
    throw ValidationError("sampling model is incomplete");
  }
  const size_t n = static_cast<size_t>(model.network->num_nodes());
  if (model.infected_batch.size() != n || model.recovered_batch.size() != n) {
    throw ValidationError("batch sizes must have one entry per node");
  }
  for (const MeasurementId& m : measurements) {
    if (m.node < 0 || static_cast<size_t>(m.node) >= n || m.time < 0) {
      throw ValidationError("measurement " + ToString(m) + " out of range");
    }
  }
}

}  // namespace

void BetaPrior::Validate() const {
  if (!(shape_a > 1.0) || !(shape_b > 1.0)) {
    throw ValidationError("beta prior shapes must exceed 1");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("beta prior support must satisfy lo < hi");
  }
}

double BetaPrior::Density(double value) const {
  const double width = hi - lo;
  const double u = (value - lo) / width;
  if (!(u > 0.0 && u < 1.0)) return 0.0;
  const double log_norm =
      std::lgamma(shape_a) + std::lgamma(shape_b) - std::lgamma(shape_a + shape_b);
  return std::exp((shape_a - 1.0) * std::log(u) +
                  (shape_b - 1.0) * std::log1p(-u) - log_norm) /
         width;
}

double BetaPrior::Score(double value) const {
  const double width = hi - lo;
  const double u = (value - lo) / width;
  return ((shape_a - 1.0) / u - (shape_b - 1.0) / (1.0 - u)) / width;
}

ThetaGrid BuildThetaGrid(const BetaPrior& beta_prior,
                         const BetaPrior& delta_prior, int points_per_axis) {
  beta_prior.Validate();
  delta_prior.Validate();
  if (points_per_axis < 1) throw ValidationError("grid needs at least one point");
  const double db = (beta_prior.hi - beta_prior.lo) / points_per_axis;
  const double dd = (delta_prior.hi - delta_prior.lo) / points_per_axis;
  ThetaGrid grid;
  grid.points_per_axis = points_per_axis;
  for (int p = 0; p < points_per_axis; ++p) {
    const double beta = beta_prior.lo + (p + 0.5) * db;
    const double beta_density = beta_prior.Density(beta);
    for (int q = 0; q < points_per_axis; ++q) {
      const double delta = delta_prior.lo + (q + 0.5) * dd;
      grid.nodes.push_back({beta, delta});
      grid.weights.push_back(db * dd * beta_density * delta_prior.Density(delta));
    }
  }
  return grid;
}

InfoMatrix PriorInformation(const ThetaGrid& grid, const BetaPrior& beta_prior,
                            const BetaPrior& delta_prior) {
  InfoMatrix info;
  for (size_t q = 0; q < grid.nodes.size(); ++q) {
    const double sb = beta_prior.Score(grid.nodes[q].beta);
    const double sd = delta_prior.Score(grid.nodes[q].delta);
    info.a += grid.weights[q] * sb * sb;
    info.c += grid.weights[q] * sd * sd;
  }
  if (!IsPositiveDefinite(info)) {
    throw ValidationError("prior information is not positive definite");
  }
  return info;
}

std::vector<InfoMatrix> ComputeInformationAtoms(
    const SamplingModel& model, const ThetaGrid& grid,
    std::span<const MeasurementId> measurements, int workers) {
  CheckModel(model, measurements);
  const int steps = LastTime(measurements);
  const size_t chunks = (grid.nodes.size() + kChunk - 1) / kChunk;
  auto partials = ParallelMap(chunks, workers, [&](size_t chunk) {
    std::vector<InfoMatrix> sum(measurements.size());
    const size_t end = std::min(grid.nodes.size(), (chunk + 1) * kChunk);
    for (size_t q = chunk * kChunk; q < end; ++q) {
      const SensitivityTrajectory traj = SimulateWithSensitivities(
          *model.network, *model.initial, grid.nodes[q], steps);
      for (size_t m = 0; m < measurements.size(); ++m) {
        sum[m] += grid.weights[q] * SampleInformation(model, traj, measurements[m]);
      }
    }
    return sum;
  });
  std::vector<InfoMatrix> atoms(measurements.size());
  for (const auto& partial : partials) {
    for (size_t m = 0; m < atoms.size(); ++m) atoms[m] += partial[m];
  }
  return atoms;
}

InfoMatrix ExpectedSampleInformation(const SamplingModel& model,
                                     const ThetaGrid& grid,
                                     std::span<const MeasurementId> measurements,
                                     std::span<const int> counts) {
  CheckModel(model, measurements);
  if (counts.size() != measurements.size()) {
    throw ValidationError("one count per measurement required");
  }
  const int steps = LastTime(measurements);
  InfoMatrix total;
  for (size_t q = 0; q < grid.nodes.size(); ++q) {
    const SensitivityTrajectory traj = SimulateWithSensitivities(
        *model.network, *model.initial, grid.nodes[q], steps);
    InfoMatrix at_node;
    for (size_t m = 0; m < measurements.size(); ++m) {
      if (counts[m] == 0) continue;
      at_node += static_cast<double>(counts[m]) *
                 SampleInformation(model, traj, measurements[m]);
    }
    total += grid.weights[q] * at_node;
  }
  return total;
}

}  // namespace epimeas
