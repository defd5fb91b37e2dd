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

#ifndef STOCHMATCH_SRC_COMPILED_H_
#define STOCHMATCH_SRC_COMPILED_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "stochmatch/instance.h"
#include "stochmatch/rng.h"

namespace stochmatch::internal {

inline constexpr std::size_t kNoPair = static_cast<std::size_t>(-1);

// Flat view of an instance for the simulation hot loops.
struct CompiledType {
  EdgeClass type_class = EdgeClass::kFirst;
  std::size_t edges = 0;
  double rate = 0.0;
  std::array<std::size_t, 2> offline{};
  std::array<EdgeClass, 2> edge_class{};
  std::array<double, 2> weight{};
  std::array<double, 2> x{};
  std::array<std::size_t, 2> edge_index{};  // global edge number
  std::size_t pair = kNoPair;               // index into CompiledInstance::pairs
};

struct CompiledInstance {
  std::size_t offline_count = 0;
  std::size_t edge_count = 0;
  double total_rate = 0.0;
  std::vector<CompiledType> types;
  std::vector<double> cumulative_rate;
  // (u, v) with u < v; those sharing a two-edge type, or all pairs.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  // Requires a valid instance.
  static CompiledInstance Build(const Instance& instance, bool all_pairs = false);

  std::size_t FindPair(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(u, v));
    return it != pairs.end() && *it == std::make_pair(u, v)
               ? static_cast<std::size_t>(it - pairs.begin())
               : kNoPair;
  }

  // Advances `t` to the next arrival of the merged process; false once the
  // next arrival would fall after 1.
  bool NextArrival(SplitMix64& rng, double& t, std::size_t& type) const {
    if (total_rate <= 0.0) return false;
    t += -std::log1p(-rng.Uniform()) / total_rate;
    if (t > 1.0) return false;
    const double target = rng.Uniform() * total_rate;
    auto it = std::upper_bound(cumulative_rate.begin(), cumulative_rate.end(), target);
    type = std::min(static_cast<std::size_t>(it - cumulative_rate.begin()),
                    types.size() - 1);
    return true;
  }
};

// Arrival stream and decision stream of trial `index`.
inline SplitMix64 ArrivalStreamFor(std::uint64_t seed, std::uint64_t index) {
  return DeriveStream(seed, 2 * index);
}
inline SplitMix64 DecisionStreamFor(std::uint64_t seed, std::uint64_t index) {
  return DeriveStream(seed, 2 * index + 1);
}

// Throws Error(kInvalidArgument) unless every offline vertex carries exactly
// 1 - ln 2 of first-class mass.
void RequireReclassified(const Instance& instance);

// Number of grid intervals for a step that must divide [0, 1].
std::size_t GridIntervals(double grid_step);

// Smallest b in [0, m] with b / m >= t, for t in [0, 1].
inline std::size_t GridBin(double t, std::size_t m) {
  const double md = static_cast<double>(m);
  auto b = static_cast<std::size_t>(std::ceil(t * md));
  if (b > m) b = m;
  while (b > 0 && static_cast<double>(b - 1) / md >= t) --b;
  while (b < m && static_cast<double>(b) / md < t) ++b;
  return b;
}

}  // namespace stochmatch::internal

#endif  // STOCHMATCH_SRC_COMPILED_H_
