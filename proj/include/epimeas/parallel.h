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

#ifndef EPIMEAS_PARALLEL_H_
#define EPIMEAS_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace epimeas {

// Evaluates fn(0..count-1) on up to `workers` threads and returns the results
// in index order. Callers reduce the returned vector sequentially, so the
// outcome does not depend on the worker count. The first exception thrown by
// any task is rethrown on the calling thread.
template <typename Fn>
auto ParallelMap(size_t count, int workers, Fn fn)
    -> std::vector<decltype(fn(size_t{0}))> {
  using Result = decltype(fn(size_t{0}));
  std::vector<Result> results(count);
  const size_t threads =
      std::min(count, static_cast<size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(run);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace epimeas

#endif  // EPIMEAS_PARALLEL_H_
