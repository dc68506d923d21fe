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

// Prior-weighted Fisher information of noisy binomial state samples.

#ifndef EPIMEAS_BAYES_H_
#define EPIMEAS_BAYES_H_

#include <span>
#include <vector>

#include "epimeas/dynamics.h"
#include "epimeas/info_matrix.h"
#include "epimeas/measurement.h"
#include "epimeas/network.h"

namespace epimeas {

// Beta(shape_a, shape_b) stretched onto [lo, hi]. Both shapes must exceed 1
// so the log-density is differentiable and its score square-integrable.
struct BetaPrior {
  double shape_a = 2.0;
  double shape_b = 2.0;
  double lo = 0.0;
  double hi = 1.0;

  void Validate() const;  // throws ValidationError
  double Density(double value) const;
  // d/dvalue of log Density.
  double Score(double value) const;
};

// Tensor midpoint rule over the prior box. weight = cell area * joint density.
struct ThetaGrid {
  int points_per_axis = 0;
  std::vector<Theta> nodes;
  std::vector<double> weights;
};

ThetaGrid BuildThetaGrid(const BetaPrior& beta_prior,
                         const BetaPrior& delta_prior, int points_per_axis);

// Diagonal prior information: E[score^2] per coordinate under the grid.
// Throws ValidationError unless the result is positive definite.
InfoMatrix PriorInformation(const ThetaGrid& grid, const BetaPrior& beta_prior,
                            const BetaPrior& delta_prior);

// Sampling setup shared by every grid node.
struct SamplingModel {
  const EpidemicNetwork* network = nullptr;
  const InitialCondition* initial = nullptr;
  // Tests per copy, indexed by node.
  std::span<const double> infected_batch;
  std::span<const double> recovered_batch;
};

inline constexpr double kSaturationMargin = 1e-12;

// For every requested sample m, E_theta[ batch / (v (1 - v)) * g g^T ] with v
// the state value and g its theta-gradient; zero where v is exactly 0.
// Throws ValidationError if some v >= 1 - kSaturationMargin. The result is
// independent of `workers`.
std::vector<InfoMatrix> ComputeInformationAtoms(
    const SamplingModel& model, const ThetaGrid& grid,
    std::span<const MeasurementId> measurements, int workers = 1);

// Same integrand with the copy counts folded in before integrating:
// E_theta[ sum_m counts[m] * batch / (v (1 - v)) * g g^T ].
InfoMatrix ExpectedSampleInformation(const SamplingModel& model,
                                     const ThetaGrid& grid,
                                     std::span<const MeasurementId> measurements,
                                     std::span<const int> counts);

}  // namespace epimeas

#endif  // EPIMEAS_BAYES_H_
