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


#include "epimeas/measurement.h"

#include <cmath>

#include "epimeas/errors.h"

namespace epimeas {

std::string ToString(const MeasurementId& id) {
  return std::string(1, KindLetter(id.kind)) + std::to_string(id.node + 1) +
         "[" + std::to_string(id.time) + "]";
}

MeasurementCosts::MeasurementCosts(int first_time, int last_time,
                                   int num_nodes)
    : first_time_(first_time), last_time_(last_time), num_nodes_(num_nodes) {
  if (first_time < 0 || last_time < first_time || num_nodes < 1) {
    throw ValidationError("cost window needs 0 <= t1 <= t2 and n >= 1");
  }
  costs_.resize(static_cast<size_t>(last_time - first_time + 1) * num_nodes * 2);
}

int MeasurementCosts::Index(int time, int node, StateKind kind) const {
  if (time < first_time_ || time > last_time_ || node < 0 ||
      node >= num_nodes_) {
    return -1;
  }
  return ((time - first_time_) * num_nodes_ + node) * 2 +
         (kind == StateKind::kInfected ? 0 : 1);
}

void MeasurementCosts::Set(int time, int node, StateKind kind, double cost) {
  const int index = Index(time, node, kind);
  if (index < 0) throw ValidationError("cost entry outside the window");
  if (!std::isfinite(cost) || cost < 0.0) {
    throw ValidationError("costs must be finite and non-negative");
  }
  costs_[index] = cost;
}

std::optional<double> MeasurementCosts::Get(int time, int node,
                                            StateKind kind) const {
  const int index = Index(time, node, kind);
  if (index < 0) return std::nullopt;
  return costs_[index];
}

}  // namespace epimeas
