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

// Parameter searches on the hard instance: the (k, t0, t1) saddle point that
// bounds every online algorithm, and the restricted threshold (t1 = t0) that
// balances first- and second-class edge rates.

#ifndef STOCHMATCH_OPTIMIZER_H_
#define STOCHMATCH_OPTIMIZER_H_

#include <functional>

namespace stochmatch {

struct HardnessOptimum {
  double k = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double ratio = 0.0;
};

struct ThresholdOptimum {
  double t0 = 0.0;
  double t1 = 0.0;
  double ratio = 0.0;
};

struct RestrictedOptimum {
  double t0 = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // |h(t0)| at the returned root
};

struct OptimizerOptions {
  double tol = 1e-7;
  // Coarse points per coordinate scanned before each golden-section search.
  int grid_points = 20;
  double k_min = 1.0;
  double k_max = 20.0;
  // 0 picks the hardware concurrency.
  unsigned threads = 0;
};

// ALG(k, t0, t1) / LP(G(k)).
double HardnessRatio(double k, double t0, double t1);

// Best thresholds for a fixed k: the optimal online algorithm on G(k).
ThresholdOptimum OptimizeThresholds(double k, const OptimizerOptions& options = {});

// min over k of the optimal-threshold ratio. Throws Error(kNumeric) when the
// minimizer lands on the k_max cap.
HardnessOptimum OptimizeHardness(const OptimizerOptions& options = {});

// h(t0) = q1 / (1 - ln 2) - q2 / ln 2 with t1 = t0.
double RestrictedImbalance(double t0);

// Bisection root of RestrictedImbalance on [0, 1]. Throws Error(kNumeric)
// when h does not change sign.
RestrictedOptimum SolveRestricted(double tol = 1e-9);

// Golden-section search for a maximum of a unimodal f on [lo, hi].
struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};
ScalarOptimum GoldenMaximize(const std::function<double(double)>& f, double lo,
                             double hi, double tol);

}  // namespace stochmatch

#endif  // STOCHMATCH_OPTIMIZER_H_
