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


#ifndef EPIMEAS_MEASUREMENT_H_
#define EPIMEAS_MEASUREMENT_H_

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "epimeas/dynamics.h"

namespace epimeas {

// A single state sample x_i[k] or r_i[k]; ordered by (node, time, kind).
struct MeasurementId {
  int node = 0;
  int time = 0;
  StateKind kind = StateKind::kInfected;

  auto operator<=>(const MeasurementId&) const = default;
};

// e.g. "x3[5]" with a 1-based node id.
std::string ToString(const MeasurementId& id);

// Per-sample costs on the window first_time..last_time. Entries may be left
// unset; consumers decide whether that is an error.
class MeasurementCosts {
 public:
  MeasurementCosts(int first_time, int last_time, int num_nodes);

  // Throws ValidationError outside the window or for a negative cost.
  void Set(int time, int node, StateKind kind, double cost);
  std::optional<double> Get(int time, int node, StateKind kind) const;
  int first_time() const { return first_time_; }
  int last_time() const { return last_time_; }
  int num_nodes() const { return num_nodes_; }

 private:
  int Index(int time, int node, StateKind kind) const;

  int first_time_;
  int last_time_;
  int num_nodes_;
  std::vector<std::optional<double>> costs_;
};

}  // namespace epimeas

#endif  // EPIMEAS_MEASUREMENT_H_
