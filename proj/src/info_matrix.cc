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

#include "epimeas/info_matrix.h"

#include <cmath>

namespace epimeas {

double InfoMatrix::frobenius() const {
  return std::sqrt(a * a + 2.0 * b * b + c * c);
}

Eigenvalues2 Eig2(const InfoMatrix& m) {
  const double tr = m.trace();
  // tr^2 - 4 det written as a sum of squares, so it cannot go negative.
  const double root = std::hypot(m.a - m.c, 2.0 * m.b);
  const double first = tr >= 0.0 ? 0.5 * (tr + root) : 0.5 * (tr - root);
  if (first == 0.0) return {0.0, 0.0};
  return {first, m.det() / first};
}

bool IsPsd(const InfoMatrix& m, double tolerance) {
  const Eigenvalues2 eig = Eig2(m);
  return eig.first >= -tolerance && eig.second >= -tolerance;
}

bool IsPositiveDefinite(const InfoMatrix& m) {
  const Eigenvalues2 eig = Eig2(m);
  return eig.first > 0.0 && eig.second > 0.0;
}

}  // namespace epimeas
