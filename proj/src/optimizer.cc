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

#include "stochmatch/optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "parallel.h"
#include "stochmatch/analytics.h"
#include "stochmatch/error.h"
#include "stochmatch/instance.h"

namespace stochmatch {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;

// Coarse scan of `points` equally spaced values, then golden-section inside
// the bracket around the best one.
ScalarOptimum ScanThenGolden(const std::function<double(double)>& f, double lo,
                             double hi, int points, double tol) {
  if (hi - lo <= tol) {
    const double x = 0.5 * (lo + hi);
    return {x, f(x)};
  }
  points = std::max(points, 3);
  std::vector<double> xs(static_cast<std::size_t>(points));
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    xs[i] = i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);
    const double v = f(xs[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = xs[std::max(best - 1, 0)];
  const double b = xs[std::min(best + 1, points - 1)];
  ScalarOptimum refined = GoldenMaximize(f, a, b, tol);
  if (refined.value >= best_value) return refined;
  return {xs[best], best_value};
}

}  // namespace

ScalarOptimum GoldenMaximize(const std::function<double(double)>& f, double lo,
                             double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  // The endpoints of the original interval are candidates too: golden
  // section never samples them.
  ScalarOptimum best = fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm > best.value) best = {mid, fm};
  for (double edge : {lo, hi}) {
    if (std::abs(edge - best.x) <= 2.0 * tol) {
      const double fe = f(edge);
      if (fe > best.value) best = {edge, fe};
    }
  }
  return best;
}

double HardnessRatio(double k, double t0, double t1) {
  return AlgObjective({k, t0, t1}) / HardLpValue(k);
}

ThresholdOptimum OptimizeThresholds(double k, const OptimizerOptions& options) {
  auto best_over_t1 = [&](double t0) {
    return ScanThenGolden([&](double t1) { return HardnessRatio(k, t0, t1); }, t0,
                          1.0, options.grid_points, options.tol);
  };
  const ScalarOptimum middle =
      ScanThenGolden([&](double t0) { return best_over_t1(t0).value; }, 0.0, 1.0,
                     options.grid_points, options.tol);
  const ScalarOptimum inner = best_over_t1(middle.x);
  return {middle.x, inner.x, inner.value};
}

HardnessOptimum OptimizeHardness(const OptimizerOptions& options) {
  if (!(options.tol > 0.0 && options.tol <= 1e-4)) {
    throw Error(ErrorCode::kInvalidArgument, "tol must lie in (0, 1e-4]");
  }
  const int n = std::max(options.grid_points, 3);
  const double k_lo = options.k_min;
  const double k_hi = options.k_max;

  // Coarse (k, t0, t1) grid; each k row keeps its best threshold ratio.
  std::vector<double> row_best(static_cast<std::size_t>(n));
  internal::ParallelFor(static_cast<std::size_t>(n), options.threads, [&](std::size_t i) {
    const double k = k_lo + (k_hi - k_lo) * static_cast<double>(i) / (n - 1);
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      const double t0 = static_cast<double>(a) / (n - 1);
      for (int b = 0; b < n; ++b) {
        const double t1 = std::min(1.0, t0 + (1.0 - t0) * b / (n - 1));
        best = std::max(best, HardnessRatio(k, t0, t1));
      }
    }
    row_best[i] = best;
  });
  const auto worst = static_cast<int>(
      std::min_element(row_best.begin(), row_best.end()) - row_best.begin());
  const double step = (k_hi - k_lo) / (n - 1);
  const double lo = k_lo + step * std::max(worst - 1, 0);
  const double hi = k_lo + step * std::min(worst + 1, n - 1);

  // Minimize over k == maximize the negated optimal-threshold ratio.
  const ScalarOptimum outer = GoldenMaximize(
      [&](double k) { return -OptimizeThresholds(k, options).ratio; }, lo, hi,
      options.tol);
  if (outer.x >= k_hi - 10.0 * options.tol) {
    throw Error(ErrorCode::kNumeric,
                "hardness minimizer hit the k cap " + std::to_string(k_hi));
  }
  const ThresholdOptimum thresholds = OptimizeThresholds(outer.x, options);
  return {outer.x, thresholds.t0, thresholds.t1, thresholds.ratio};
}

double RestrictedImbalance(double t0) {
  const RestrictedRates r = ComputeRestrictedRates(t0);
  return r.gamma_first - r.gamma_second;
}

RestrictedOptimum SolveRestricted(double tol) {
  if (!(tol > 0.0 && tol <= 1e-6)) {
    throw Error(ErrorCode::kInvalidArgument, "tol must lie in (0, 1e-6]");
  }
  double a = 0.0;
  double b = 1.0;
  double ha = RestrictedImbalance(a);
  const double hb = RestrictedImbalance(b);
  if (!(ha < 0.0 && hb > 0.0) && !(ha > 0.0 && hb < 0.0)) {
    throw Error(ErrorCode::kNumeric,
                "restricted imbalance has no sign change on [0, 1] (h(0)=" +
                    std::to_string(ha) + ", h(1)=" + std::to_string(hb) + ")");
  }
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double hm = RestrictedImbalance(m);
    if (hm == 0.0) {
      a = b = m;
      break;
    }
    if ((hm < 0.0) == (ha < 0.0)) {
      a = m;
      ha = hm;
    } else {
      b = m;
    }
  }
  const double root = 0.5 * (a + b);
  const RestrictedRates r = ComputeRestrictedRates(root);
  return {root, 0.5 * (r.gamma_first + r.gamma_second),
          std::abs(r.gamma_first - r.gamma_second)};
}

}  // namespace stochmatch
