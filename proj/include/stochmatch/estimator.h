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

// Lockstep-ensemble Monte-Carlo estimates of the pairwise both-unmatched
// probabilities g'_{u,v}(t) of the generalized algorithm on a time grid.
//
// The algorithm's decisions in (tau_j, tau_{j+1}] depend on g'_{u,v}, which
// is a statistic of the algorithm itself. The ensemble is advanced one grid
// interval at a time; every decision in an interval uses the ratio frozen
// from the ensemble's statistics at tau_j, and the statistics are recomputed
// at tau_{j+1} before any trajectory moves on.

#ifndef STOCHMATCH_ESTIMATOR_H_
#define STOCHMATCH_ESTIMATOR_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stochmatch/analytics.h"
#include "stochmatch/instance.h"

namespace stochmatch {

// Counters of the per-decision guards of the generalized/auxiliary rules.
struct DecisionStats {
  // Second-class edge evaluations after t0 with a free endpoint.
  std::uint64_t second_class_decisions = 0;
  // min{., 1} engaged (raw ratio above 1).
  std::uint64_t clamps = 0;
  // Clamps where the shortfall of the denominator below ḡ(t) exceeds three
  // standard errors of the estimate it was computed from.
  std::uint64_t excess_clamps = 0;
  // Lookups whose interpolated ḡ_{u,v} fell below ḡ(t) and was floored.
  std::uint64_t floors = 0;

  DecisionStats& operator+=(const DecisionStats& o) {
    second_class_decisions += o.second_class_decisions;
    clamps += o.clamps;
    excess_clamps += o.excess_clamps;
    floors += o.floors;
    return *this;
  }
};

struct PairEstimate {
  std::string u;
  std::string v;
  std::size_t u_index = 0;
  std::size_t v_index = 0;
  // One entry per grid point.
  std::vector<double> g_prime;
  std::vector<double> g_bar_uv;  // 2 (1 - f_single(tau)) - g'_{u,v}(tau)
  std::vector<double> se;        // standard error of g'_{u,v}(tau)
};

struct GridEstimate {
  double t0 = 0.0;
  std::vector<double> grid;  // tau_j = j / m, j = 0..m
  std::vector<PairEstimate> pairs;
  std::uint64_t ensemble_size = 0;
  std::uint64_t seed = 0;
  // Algorithm-5 guard counters observed while the ensemble ran.
  DecisionStats stats;
  std::vector<std::string> warnings;

  std::size_t intervals() const { return grid.empty() ? 0 : grid.size() - 1; }
  // Index into `pairs`, or npos. Order of u and v does not matter.
  std::size_t FindPair(std::size_t u, std::size_t v) const;
  std::size_t FindPair(std::string_view u, std::string_view v) const;
};

struct EstimateOptions {
  double t0 = 0.0;
  double grid_step = 1e-2;
  std::uint64_t ensemble_size = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  // Estimate every offline pair, not only those sharing a two-edge type.
  bool all_pairs = false;
};

// `instance` must be valid and reclassified.
GridEstimate Estimate(const Instance& instance, const EstimateOptions& options);

struct PairLookup {
  double g_bar_uv = 1.0;
  double g_prime = 1.0;
  double se = 0.0;
  bool floored = false;
};

// Linear interpolation between the bracketing grid points, clamped to
// [0, 1], with ḡ_{u,v} floored at the reference ḡ(t). Throws
// Error(kInvalidArgument) for an unknown pair or t outside [0, 1].
PairLookup Lookup(const GridEstimate& estimate, std::size_t pair, double t);
PairLookup Lookup(const GridEstimate& estimate, std::string_view u,
                  std::string_view v, double t);
// Same, with the reference curves at t already evaluated.
PairLookup Lookup(const GridEstimate& estimate, std::size_t pair, double t,
                  const ReferenceCurves& reference);

// Rows: pair_u,pair_v,tau,g_prime,g_bar_uv,se.
std::string EstimateToCsv(const GridEstimate& estimate);
// Inverse of EstimateToCsv; `instance` resolves ids and t0 recomputes the
// reference curves.
GridEstimate EstimateFromCsv(std::string_view csv, const Instance& instance, double t0);

}  // namespace stochmatch

#endif  // STOCHMATCH_ESTIMATOR_H_
