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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stochmatch/analytics.h"
#include "stochmatch/error.h"
#include "stochmatch/instance.h"

namespace stochmatch {
namespace {

constexpr double kA = 1.0 - kLn2;
const HardParams kOpt{3.40216, 0.12437, 0.29539};

struct Rhs {
  double f, g, p;
};

// Phase-wise right-hand side for (f_one, g_both, p_first).
Rhs Ode(const HardParams& prm, double t, const CurvePoint& c) {
  const double none = 1.0 - c.f_one - c.g_both;
  double dg;
  double df;
  if (t < prm.t0) {
    dg = c.f_one * kA;
    df = 2.0 * none * kA - dg;
  } else {
    dg = c.f_one * (t < prm.t1 ? kA : 1.0 + kLn2);
    df = 2.0 * none - dg;
  }
  return {df, dg, 2.0 * none * kA + c.f_one * kA};
}

TEST(Curves, StartAtZero) {
  for (const HardParams& p : {kOpt, HardParams{1.0, 0.0, 0.0}, HardParams{5.0, 1.0, 1.0}}) {
    const CurvePoint c = EvalCurves(p, 0.0);
    EXPECT_EQ(c.f_one, 0.0);
    EXPECT_EQ(c.g_both, 0.0);
    EXPECT_EQ(c.p_first, 0.0);
  }
}

TEST(Curves, ContinuousAtThresholds) {
  for (double t : {kOpt.t0, kOpt.t1}) {
    const CurvePoint lo = EvalCurves(kOpt, std::nextafter(t, 0.0));
    const CurvePoint hi = EvalCurves(kOpt, std::nextafter(t, 1.0));
    EXPECT_NEAR(lo.f_one, hi.f_one, 1e-12);
    EXPECT_NEAR(lo.g_both, hi.g_both, 1e-12);
    EXPECT_NEAR(lo.p_first, hi.p_first, 1e-12);
  }
}

TEST(Curves, RejectsBadArguments) {
  EXPECT_THROW(EvalCurves(kOpt, -0.01), Error);
  EXPECT_THROW(EvalCurves(kOpt, 1.01), Error);
  EXPECT_THROW(EvalCurves({0.5, 0.1, 0.2}, 0.5), Error);
  EXPECT_THROW(EvalCurves({2.0, 0.3, 0.2}, 0.5), Error);
  EXPECT_THROW(EvalCurves({2.0, 0.3, 1.2}, 0.5), Error);
  EXPECT_THROW(OdeOracle(kOpt, 0.0), Error);
  EXPECT_THROW(OdeOracle(kOpt, 0.02), Error);
}

TEST(Curves, MatchOde) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    const HardParams p{1.0 + 9.0 * u(rng), a, b};
    for (const CurvePoint& o : OdeOracle(p, 1e-3)) {
      const CurvePoint c = EvalCurves(p, o.t);
      ASSERT_NEAR(c.f_one, o.f_one, 1e-8) << "t=" << o.t;
      ASSERT_NEAR(c.g_both, o.g_both, 1e-8) << "t=" << o.t;
      ASSERT_NEAR(c.p_first, o.p_first, 1e-8) << "t=" << o.t;
    }
  }
}

TEST(Curves, OdeEndpointFineStep) {
  const auto table = OdeOracle(kOpt, 1e-4);
  ASSERT_DOUBLE_EQ(table.back().t, 1.0);
  const CurvePoint c = EvalCurves(kOpt, 1.0);
  EXPECT_NEAR(c.f_one, table.back().f_one, 1e-8);
  EXPECT_NEAR(c.g_both, table.back().g_both, 1e-8);
  EXPECT_NEAR(c.p_first, table.back().p_first, 1e-8);
  for (std::size_t i = 1; i < table.size(); ++i) {
    ASSERT_GE(table[i].g_both, table[i - 1].g_both);
  }
}

TEST(Curves, OdeDegenerateMiddlePhase) {
  const HardParams p{2.0, 0.3, 0.3};
  const auto table = OdeOracle(p, 1e-3);
  const CurvePoint c = EvalCurves(p, 1.0);
  EXPECT_NEAR(c.g_both, table.back().g_both, 1e-8);
}

TEST(Curves, ResidualAgainstOde) {
  constexpr double h = 1e-6;
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1001.0;
    if (std::abs(t - kOpt.t0) < 2 * h || std::abs(t - kOpt.t1) < 2 * h) continue;
    const CurvePoint lo = EvalCurves(kOpt, t - h);
    const CurvePoint hi = EvalCurves(kOpt, t + h);
    const Rhs r = Ode(kOpt, t, EvalCurves(kOpt, t));
    ASSERT_NEAR((hi.f_one - lo.f_one) / (2 * h), r.f, 1e-6) << "t=" << t;
    ASSERT_NEAR((hi.g_both - lo.g_both) / (2 * h), r.g, 1e-6) << "t=" << t;
    ASSERT_NEAR((hi.p_first - lo.p_first) / (2 * h), r.p, 1e-6) << "t=" << t;
  }
}

TEST(Derived, Identities) {
  for (int i = 0; i <= 200; ++i) {
    const double t = i / 200.0;
    const CurvePoint c = EvalCurves(kOpt, t);
    const DerivedCurves d = Derive(c);
    EXPECT_NEAR(c.f_one + c.g_both + d.g_prime, 1.0, 1e-12);
    EXPECT_NEAR(d.g_bar, 2.0 * (1.0 - d.f_single) - d.g_prime, 1e-12);
    EXPECT_NEAR(2.0 * d.q1 + 2.0 * d.q2, c.f_one + 2.0 * c.g_both, 1e-12);
  }
}

TEST(Derived, MatchedVertexGrowthAfterThresholds) {
  constexpr double h = 1e-6;
  const HardParams p{1.0, 0.14753, 0.14753};
  for (int i = 1; i < 100; ++i) {
    const double t = 0.15 + 0.84 * i / 100.0;
    const double lo = Derive(EvalCurves(p, t - h)).f_single;
    const double hi = Derive(EvalCurves(p, t + h)).f_single;
    const DerivedCurves d = Derive(EvalCurves(p, t));
    EXPECT_NEAR((hi - lo) / (2 * h), kA * (1.0 - d.f_single) + kLn2 * d.g_bar, 1e-6);
  }
}

TEST(Objective, UnitWeights) {
  const HardParams p{1.0, 0.2, 0.4};
  const CurvePoint c = EvalCurves(p, 1.0);
  EXPECT_NEAR(AlgObjective(p), c.f_one + 2.0 * c.g_both, 1e-15);
}

TEST(Objective, HardOptimumRatio) {
  EXPECT_NEAR(AlgObjective(kOpt) / LpValue(MakeHardInstance(kOpt.k)), 0.66275, 5e-5);
}

TEST(Restricted, BalancedRates) {
  const RestrictedRates r = ComputeRestrictedRates(0.14753);
  EXPECT_NEAR(r.gamma_first, 0.66217, 5e-5);
  EXPECT_NEAR(r.gamma_second, 0.66217, 5e-5);
  EXPECT_NEAR(r.q1, 0.20320, 5e-5);
  EXPECT_NEAR(r.q2, 0.45899, 5e-5);
  EXPECT_NEAR(r.q1, r.gamma_first * kA, 1e-15);
}

TEST(Restricted, Reference) {
  const ReferenceCurves zero = RestrictedReference(0.14753, 0.0);
  EXPECT_EQ(zero.g_bar, 1.0);
  EXPECT_EQ(zero.f_single_bar, 1.0);
  const ReferenceCurves r = RestrictedReference(0.14753, 0.7);
  const DerivedCurves d = Derive(EvalCurves({1.0, 0.14753, 0.14753}, 0.7));
  EXPECT_DOUBLE_EQ(r.g_bar, d.g_bar);
  EXPECT_DOUBLE_EQ(r.f_single_bar, 1.0 - d.f_single);
}

}  // namespace
}  // namespace stochmatch
