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

#ifndef EPIMEAS_RNG_H_
#define EPIMEAS_RNG_H_

#include <cstdint>
#include <string_view>

namespace epimeas {

// Counter-based generator: the i-th draw is the SplitMix64 finalizer applied
// to seed + i * golden_gamma. Draws are a pure function of (seed, i), so any
// language with 64-bit unsigned arithmetic reproduces them exactly.
inline constexpr std::string_view kRngName = "splitmix64-counter";

constexpr uint64_t SplitMix64Finalize(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of replication `index` under `master_seed`.
constexpr uint64_t DeriveSeed(uint64_t master_seed, uint64_t index) {
  return SplitMix64Finalize(master_seed ^
                            SplitMix64Finalize(index + 0x632be59bd9b4e019ULL));
}

class CounterRng {
 public:
  explicit constexpr CounterRng(uint64_t seed) : seed_(seed) {}

  constexpr uint64_t NextU64() {
    ++counter_;
    return SplitMix64Finalize(seed_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double NextUnit() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  constexpr double Uniform(double lo, double hi) {
    return lo + (hi - lo) * NextUnit();
  }

  // Uniform on the integers lo..hi inclusive.
  constexpr int UniformInt(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(NextU64() % span);
  }

  constexpr uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

}  // namespace epimeas

#endif  // EPIMEAS_RNG_H_
