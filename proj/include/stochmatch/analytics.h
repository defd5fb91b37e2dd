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

// Closed-form matching process of the threshold policy on the hard instance
// G, and an independent RK4 integration of the same process.
//
// Two "f"s are in play and are kept apart by name:
//   f_one    -- probability that exactly one of the two offline vertices is
//               matched,
//   f_single -- probability that a particular offline vertex is matched
//               (= g_both + f_one / 2 by symmetry).

#ifndef STOCHMATCH_ANALYTICS_H_
#define STOCHMATCH_ANALYTICS_H_

#include <vector>

namespace stochmatch {

// (k, t0, t1): first-class weight and the two discard thresholds.
struct HardParams {
  double k = 1.0;
  double t0 = 0.0;
  double t1 = 0.0;

  // Throws Error(kInvalidArgument) unless k >= 1 and 0 <= t0 <= t1 <= 1.
  void Check() const;
};

struct CurvePoint {
  double t = 0.0;
  double f_one = 0.0;
  double g_both = 0.0;
  // Expected number of matched first-class edges.
  double p_first = 0.0;
};

struct DerivedCurves {
  double f_single = 0.0;
  double g_prime = 0.0;  // both unmatched
  double g_bar = 0.0;    // at least one unmatched
  double q1 = 0.0;       // a particular first-class edge is matched
  double q2 = 0.0;       // a particular second-class edge is matched
};

CurvePoint EvalCurves(const HardParams& params, double t);
DerivedCurves Derive(const CurvePoint& point);

// f_one(1) + 2 g_both(1) + (k - 1) p_first(1).
double AlgObjective(const HardParams& params);

struct RestrictedRates {
  double q1 = 0.0;
  double q2 = 0.0;
  double gamma_first = 0.0;   // q1 / (1 - ln 2)
  double gamma_second = 0.0;  // q2 / ln 2
};

// Per-edge match probabilities at t = 1 with t1 forced to t0.
RestrictedRates ComputeRestrictedRates(double t0);

// ḡ(t) and 1 - f_single(t) of the restricted process (t1 = t0), which is
// what the generalized algorithm uses as its reference curves.
struct ReferenceCurves {
  double g_bar = 1.0;
  double f_single_bar = 1.0;
};
ReferenceCurves RestrictedReference(double t0, double t);

// Classical RK4 on the phase-wise ODE system, with step boundaries placed
// exactly on t0 and t1. Returns every node, starting at t = 0; the uniform
// nodes are i / ceil(1 / step).
std::vector<CurvePoint> OdeOracle(const HardParams& params, double step = 1e-4);

}  // namespace stochmatch

#endif  // STOCHMATCH_ANALYTICS_H_
