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

#ifndef EPIMEAS_ERRORS_H_
#define EPIMEAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace epimeas {

// Input that breaks a model assumption or a structural invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-side precondition that the input data cannot express, e.g. a
// ground element costlier than the budget handed to the greedy routine.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised by exhaustive routines when the search space exceeds their cap.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No feasible answer exists (e.g. an empty equation set).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epimeas

#endif  // EPIMEAS_ERRORS_H_
