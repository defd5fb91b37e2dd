// Copyright 2026 The Stochmatch Authors
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

#ifndef STOCHMATCH_RNG_H_
#define STOCHMATCH_RNG_H_

#include <cstdint>
#include <limits>

namespace stochmatch {

// SplitMix64. The state is a counter advanced by a fixed odd increment, so a
// stream is fully determined by its starting state and any number of streams
// can be derived from (seed, index) without coordination.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return Mix(state_ += kIncrement); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kIncrement = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

// Independent stream number `index` under `seed`.
inline SplitMix64 DeriveStream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64::Mix(seed ^ SplitMix64::Mix(index + 0x632be59bd9b4e019ULL)));
}

}  // namespace stochmatch

#endif  // STOCHMATCH_RNG_H_
