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

#include "stochmatch/analytics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "stochmatch/error.h"
#include "stochmatch/instance.h"

namespace stochmatch {
namespace {

constexpr double kL = kLn2;
constexpr double kA = 1.0 - kLn2;  // first-class hazard per vertex
constexpr double kB = 1.0 + kLn2;  // total hazard of a vertex whose partner is matched

// 2^a * e^b, evaluated as one exponential.
double Pow2Exp(double a, double b) { return std::exp(a * kL + b); }

struct FG {
  double f;
  double g;
};

// Phase 1, [0, t0]: each vertex is hit only by its own first-class type.
FG Phase1(double t) {
  const double e = std::exp(-kA * t);
  return {2.0 * (1.0 - e) * e, (1.0 - e) * (1.0 - e)};
}

// Phase 2, [t0, t1]: any arrival matches one vertex while both are free; a
// lone free vertex only accepts its first-class type.
FG Phase2(double t0, double t) {
  const double f = Pow2Exp(t + 1.0, -t) -
                   (Pow2Exp(2.0 * t0 + 1.0, -2.0 * t) +
                    Pow2Exp(t + t0 + 1.0, -t - t0) * kL) /
                       kB;
  const double g = 1.0 - Pow2Exp(t + 1.0, -t) +
                   (Pow2Exp(2.0 * t0, -2.0 * t) * kA +
                    Pow2Exp(t + t0 + 1.0, -t - t0) * kL) /
                       kB;
  return {f, g};
}

// Phase 3, [t1, 1]: a lone free vertex accepts both of its neighbors.
FG Phase3(double t0, double t1, double t) {
  const double f = Pow2Exp(2.0 * t1 + 1.0 - t, -t) -
                   Pow2Exp(2.0 * t0 + 1.0, -2.0 * t) / kA -
                   Pow2Exp(2.0 * t1 + t0 + 1.0 - t, -t - t0) * kL / kB +
                   Pow2Exp(2.0 * t0 + t1 + 2.0 - t, -t - t1) * kL / (kB * kA);
  const double g = 1.0 - Pow2Exp(2.0 * t1 + 1.0 - t, -t) +
                   Pow2Exp(2.0 * t0, -2.0 * t) * kB / kA +
                   Pow2Exp(2.0 * t1 + t0 + 1.0 - t, -t - t0) * kL / kB -
                   Pow2Exp(2.0 * t0 + t1 + 2.0 - t, -t - t1) * kL / (kB * kA);
  return {f, g};
}

// p' = (1 - ln 2) * (expected number of unmatched vertices), integrated
// piecewise over the f, g pieces above. E(t) = e^{-(1 - ln 2) t}.
double FirstClassMatches(double t0, double t1, double t) {
  const auto e = [](double s) { return std::exp(-kA * s); };
  if (t <= t0) return 2.0 * (1.0 - e(t));

  const double e0 = e(t0);
  const double p_t0 = 2.0 * (1.0 - e0);
  const auto phase2 = [&](double s) {
    return p_t0 + 2.0 * (e0 - e(s)) +
           (kL / kB) * (kA * e0 * e0 * -std::expm1(-2.0 * (s - t0)) -
                        2.0 * e0 * (e0 - e(s)));
  };
  if (t <= t1) return phase2(t);

  const double p_t1 = phase2(t1);
  // Coefficient of e^{-(1 + ln 2) s} in the unmatched count during phase 3.
  const double c = 2.0 * Pow2Exp(2.0 * t1, 0.0) -
                   (2.0 * kL / kB) * Pow2Exp(2.0 * t1 + t0, -t0) +
                   (4.0 * kL / (kA * kB)) * Pow2Exp(2.0 * t0 + t1, -t1);
  return p_t1 + kA * (c * (std::exp(-kB * t1) - std::exp(-kB * t)) / kB) -
         kL * Pow2Exp(2.0 * t0, 0.0) * (std::exp(-2.0 * t1) - std::exp(-2.0 * t));
}

void CheckTime(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "time must lie in [0, 1], got " + std::to_string(t));
  }
}

using State = std::array<double, 3>;  // f_one, g_both, p_first

enum class Phase { kIndependent, kCompeting, kBoth };

State Rhs(Phase phase, const State& y) {
  const double f = y[0];
  const double g = y[1];
  const double both_free = 1.0 - f - g;
  double dg = 0.0;
  double df = 0.0;
  switch (phase) {
    case Phase::kIndependent:
      dg = f * kA;
      df = 2.0 * kA * both_free - dg;
      break;
    case Phase::kCompeting:
      dg = f * kA;
      df = 2.0 * both_free - dg;
      break;
    case Phase::kBoth:
      dg = f * kB;
      df = 2.0 * both_free - dg;
      break;
  }
  const double dp = 2.0 * both_free * kA + f * kA;
  return {df, dg, dp};
}

State Rk4(Phase phase, const State& y, double h) {
  auto axpy = [](const State& a, double s, const State& b) {
    return State{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
  };
  const State k1 = Rhs(phase, y);
  const State k2 = Rhs(phase, axpy(y, h / 2.0, k1));
  const State k3 = Rhs(phase, axpy(y, h / 2.0, k2));
  const State k4 = Rhs(phase, axpy(y, h, k3));
  State out;
  for (int i = 0; i < 3; ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace

void HardParams::Check() const {
  if (!(k >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "k must be >= 1, got " + std::to_string(k));
  }
  if (!(t0 >= 0.0 && t0 <= t1 && t1 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "thresholds need 0 <= t0 <= t1 <= 1, got t0=" + std::to_string(t0) +
                    " t1=" + std::to_string(t1));
  }
}

CurvePoint EvalCurves(const HardParams& params, double t) {
  params.Check();
  CheckTime(t);
  FG fg;
  if (t <= params.t0) {
    fg = Phase1(t);
  } else if (t <= params.t1) {
    fg = Phase2(params.t0, t);
  } else {
    fg = Phase3(params.t0, params.t1, t);
  }
  return {t, fg.f, fg.g, FirstClassMatches(params.t0, params.t1, t)};
}

DerivedCurves Derive(const CurvePoint& point) {
  DerivedCurves d;
  d.f_single = point.g_both + point.f_one / 2.0;
  d.g_prime = 1.0 - point.f_one - point.g_both;
  d.g_bar = 1.0 - point.g_both;
  d.q1 = point.p_first / 2.0;
  d.q2 = (point.f_one + 2.0 * point.g_both - point.p_first) / 2.0;
  return d;
}

double AlgObjective(const HardParams& params) {
  const CurvePoint end = EvalCurves(params, 1.0);
  return end.f_one + 2.0 * end.g_both + (params.k - 1.0) * end.p_first;
}

RestrictedRates ComputeRestrictedRates(double t0) {
  const DerivedCurves d = Derive(EvalCurves({1.0, t0, t0}, 1.0));
  return {d.q1, d.q2, d.q1 / kA, d.q2 / kL};
}

ReferenceCurves RestrictedReference(double t0, double t) {
  const DerivedCurves d = Derive(EvalCurves({1.0, t0, t0}, t));
  return {d.g_bar, 1.0 - d.f_single};
}

std::vector<CurvePoint> OdeOracle(const HardParams& params, double step) {
  params.Check();
  if (!(step > 0.0 && step <= 1e-2)) {
    throw Error(ErrorCode::kInvalidArgument, "ODE step must lie in (0, 1e-2]");
  }
  const auto n = static_cast<long>(std::ceil(1.0 / step - 1e-9));
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(n) + 3);
  for (long i = 0; i <= n; ++i) nodes.push_back(static_cast<double>(i) / static_cast<double>(n));
  nodes.push_back(params.t0);
  nodes.push_back(params.t1);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<CurvePoint> out;
  out.reserve(nodes.size());
  State y{0.0, 0.0, 0.0};
  out.push_back({0.0, 0.0, 0.0, 0.0});
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double a = nodes[i - 1];
    const double b = nodes[i];
    const double mid = 0.5 * (a + b);
    const Phase phase = mid < params.t0   ? Phase::kIndependent
                        : mid < params.t1 ? Phase::kCompeting
                                          : Phase::kBoth;
    y = Rk4(phase, y, b - a);
    out.push_back({b, y[0], y[1], y[2]});
  }
  return out;
}

}  // namespace stochmatch
