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

#ifndef EPIMEAS_INFO_MATRIX_H_
#define EPIMEAS_INFO_MATRIX_H_

namespace epimeas {

// Symmetric 2x2 matrix [[a, b], [b, c]] over (beta, delta).
struct InfoMatrix {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static InfoMatrix Outer(double u, double v) { return {u * u, u * v, v * v}; }

  InfoMatrix& operator+=(const InfoMatrix& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
  }
  friend InfoMatrix operator+(InfoMatrix x, const InfoMatrix& y) {
    return x += y;
  }
  friend InfoMatrix operator-(const InfoMatrix& x, const InfoMatrix& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c};
  }
  friend InfoMatrix operator*(double s, const InfoMatrix& m) {
    return {s * m.a, s * m.b, s * m.c};
  }

  double trace() const { return a + c; }
  double det() const { return a * c - b * b; }
  // Trace of the inverse; requires det() != 0.
  double inverse_trace() const { return trace() / det(); }
  double frobenius() const;
};

struct Eigenvalues2 {
  double first = 0.0;   // larger magnitude
  double second = 0.0;  // smaller magnitude
};

// Closed-form eigenvalues ordered |first| >= |second|. The smaller one is
// recovered as det / first to avoid cancellation.
Eigenvalues2 Eig2(const InfoMatrix& m);

// Both eigenvalues >= -tolerance.
bool IsPsd(const InfoMatrix& m, double tolerance = 1e-12);
// Both eigenvalues > 0.
bool IsPositiveDefinite(const InfoMatrix& m);

}  // namespace epimeas

#endif  // EPIMEAS_INFO_MATRIX_H_
