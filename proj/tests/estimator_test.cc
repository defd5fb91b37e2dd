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

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "stochmatch/analytics.h"
#include "stochmatch/error.h"
#include "stochmatch/estimator.h"
#include "stochmatch/instance.h"
#include "stochmatch/simulator.h"

namespace stochmatch {
namespace {

constexpr double kT0 = 0.14753;
// Checks over a whole grid are simultaneous over ~100 correlated points; 3 SE
// per point fails often for an unbiased estimate.
constexpr double kBand = 4.0;

EstimateOptions Opts(std::uint64_t ensemble, std::uint64_t seed) {
  EstimateOptions o;
  o.t0 = kT0;
  o.ensemble_size = ensemble;
  o.seed = seed;
  o.threads = 2;
  return o;
}

const GridEstimate& HardEstimate() {
  static const GridEstimate e = Estimate(MakeHardInstance(2.0), Opts(100000, 7));
  return e;
}

TEST(Estimate, StartsUnmatched) {
  const GridEstimate& e = HardEstimate();
  ASSERT_EQ(e.grid.size(), 101u);
  ASSERT_EQ(e.pairs.size(), 1u);
  EXPECT_EQ(e.pairs[0].g_prime[0], 1.0);
  EXPECT_EQ(e.pairs[0].g_bar_uv[0], 1.0);
  EXPECT_TRUE(e.warnings.empty());
}

TEST(Estimate, HardInstanceMatchesClosedForm) {
  const GridEstimate& e = HardEstimate();
  const PairEstimate& p = e.pairs[0];
  for (std::size_t j = 0; j < e.grid.size(); ++j) {
    const double g_bar = Derive(EvalCurves({1.0, kT0, kT0}, e.grid[j])).g_bar;
    EXPECT_NEAR(p.g_bar_uv[j], g_bar, kBand * p.se[j] + 1e-12) << "tau=" << e.grid[j];
    EXPECT_GE(p.g_prime[j], 0.0);
    EXPECT_LE(p.g_prime[j], 1.0);
    if (j > 0) {
      EXPECT_LE(p.g_prime[j], p.g_prime[j - 1] + 3.0 * p.se[j]);
    }
  }
}

TEST(Estimate, DisjointCopiesIndependent) {
  const Instance two = DisjointCopies(MakeHardInstance(2.0), 2);
  EstimateOptions o = Opts(100000, 5);
  o.all_pairs = true;
  const GridEstimate e = Estimate(two, o);
  EXPECT_EQ(e.pairs.size(), 6u);
  EXPECT_TRUE(e.warnings.empty());
  const std::size_t cross = e.FindPair("u.0", "v.1");
  ASSERT_NE(cross, static_cast<std::size_t>(-1));
  const PairEstimate& p = e.pairs[cross];
  for (std::size_t j = 0; j < e.grid.size(); ++j) {
    const double fbar = 1.0 - Derive(EvalCurves({1.0, kT0, kT0}, e.grid[j])).f_single;
    EXPECT_NEAR(p.g_prime[j], fbar * fbar, kBand * p.se[j] + 1e-12) << "tau=" << e.grid[j];
  }
}

TEST(Estimate, OnlySharedPairsByDefault) {
  const GridEstimate e = Estimate(DisjointCopies(MakeHardInstance(2.0), 2), Opts(10000, 5));
  EXPECT_EQ(e.pairs.size(), 2u);
  EXPECT_EQ(e.FindPair("u.0", "u.1"), static_cast<std::size_t>(-1));
  EXPECT_EQ(e.FindPair("v.1", "u.1"), e.FindPair("u.1", "v.1"));
}

TEST(Estimate, Deterministic) {
  const Instance t = Reclassify(MakeTriangleInstance());
  EstimateOptions a = Opts(20000, 9);
  a.threads = 1;
  EstimateOptions b = a;
  b.threads = 3;
  EXPECT_EQ(EstimateToCsv(Estimate(t, a)), EstimateToCsv(Estimate(t, b)));
}

TEST(Estimate, Preconditions) {
  const Instance g = MakeHardInstance(2.0);
  EXPECT_THROW(Estimate(g, Opts(9999, 1)), Error);
  EstimateOptions o = Opts(10000, 1);
  o.grid_step = 0.1;
  EXPECT_THROW(Estimate(g, o), Error);
  o.grid_step = 5e-5;
  EXPECT_THROW(Estimate(g, o), Error);
  EXPECT_THROW(Estimate(MakeTriangleInstance(), Opts(10000, 1)), Error);
}

TEST(Estimate, SmallEnsembleWarns) {
  EstimateOptions o = Opts(10000, 2);
  o.all_pairs = true;
  const GridEstimate e = Estimate(Reclassify(MakeTriangleInstance()), o);
  ASSERT_EQ(e.pairs.size(), 3u);
  ASSERT_FALSE(e.warnings.empty());
  const PairEstimate& p = e.pairs[0];
  const double g = p.g_prime[50];
  EXPECT_NEAR(p.se[50], std::sqrt(g * (1.0 - g) / 10000.0) * std::sqrt(3.0), 1e-12);
}

TEST(Lookup, GridPointsAndStart) {
  const GridEstimate& e = HardEstimate();
  for (std::size_t j : {0u, 13u, 50u, 100u}) {
    const PairLookup l = Lookup(e, 0, e.grid[j]);
    EXPECT_EQ(l.g_prime, e.pairs[0].g_prime[j]);
    const double floor = RestrictedReference(kT0, e.grid[j]).g_bar;
    EXPECT_EQ(l.g_bar_uv, std::max(e.pairs[0].g_bar_uv[j], floor));
    EXPECT_EQ(l.floored, e.pairs[0].g_bar_uv[j] < floor);
  }
  const PairLookup zero = Lookup(e, "v", "u", 0.0);
  EXPECT_EQ(zero.g_prime, 1.0);
  EXPECT_EQ(zero.g_bar_uv, 1.0);
  const PairLookup mid = Lookup(e, 0, 0.505);
  EXPECT_NEAR(mid.g_prime, 0.5 * (e.pairs[0].g_prime[50] + e.pairs[0].g_prime[51]), 1e-15);
}

TEST(Lookup, Errors) {
  const GridEstimate& e = HardEstimate();
  EXPECT_THROW(Lookup(e, 5, 0.5), Error);
  EXPECT_THROW(Lookup(e, "u", "w", 0.5), Error);
  EXPECT_THROW(Lookup(e, 0, 1.5), Error);
}

TEST(Lookup, FlooredRatioNeverAboveOne) {
  const Instance t = Reclassify(MakeTriangleInstance());
  const GridEstimate e = Estimate(t, Opts(10000, 4));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t pair = rng() % e.pairs.size();
    const double time = u(rng);
    const ReferenceCurves ref = RestrictedReference(kT0, time);
    const PairLookup l = Lookup(e, pair, time, ref);
    ASSERT_LE(ref.g_bar / l.g_bar_uv, 1.0);
    ASSERT_GE(l.g_prime, 0.0);
    ASSERT_LE(l.g_prime, 1.0);
  }
}

TEST(Csv, RoundTrip) {
  const Instance t = Reclassify(MakeTriangleInstance());
  const GridEstimate e = Estimate(t, Opts(10000, 6));
  const GridEstimate back = EstimateFromCsv(EstimateToCsv(e), t, kT0);
  ASSERT_EQ(back.pairs.size(), e.pairs.size());
  ASSERT_EQ(back.grid.size(), e.grid.size());
  for (std::size_t i = 0; i < e.pairs.size(); ++i) {
    EXPECT_EQ(back.pairs[i].g_prime, e.pairs[i].g_prime);
    EXPECT_EQ(back.pairs[i].g_bar_uv, e.pairs[i].g_bar_uv);
    EXPECT_EQ(back.pairs[i].se, e.pairs[i].se);
  }
}

std::string Row(const char* u, const char* v, double tau, double g, double se = 0.0) {
  std::ostringstream os;
  os.precision(17);
  os << u << ',' << v << ',' << tau << ',' << g << ','
     << 2.0 * RestrictedReference(kT0, tau).f_single_bar - g << ',' << se << '\n';
  return os.str();
}

TEST(Csv, Rejects) {
  const Instance g = MakeHardInstance(2.0);
  auto code = [&](const std::string& csv, double t0 = kT0) {
    try {
      EstimateFromCsv(csv, g, t0);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  const std::string head = "pair_u,pair_v,tau,g_prime,g_bar_uv,se\n";
  const std::string start = Row("u", "v", 0, 1);
  const std::string good = head + start + Row("u", "v", 0.5, 0.7) + Row("u", "v", 1, 0.5, 0.01);
  EXPECT_EQ(code(good), ErrorCode::kInternal);
  EXPECT_EQ(code(good, 0.3), ErrorCode::kParse);
  EXPECT_EQ(code("a,b\n"), ErrorCode::kParse);
  EXPECT_EQ(code(head), ErrorCode::kParse);
  EXPECT_EQ(code(head + "u,w,0,1,1,0\nu,w,1,0.5,1,0.01\n"), ErrorCode::kParse);
  EXPECT_EQ(code(head + start + Row("u", "v", 1, 1.5)), ErrorCode::kParse);
  EXPECT_EQ(code(head + start + Row("u", "v", 1, 0.5, -1)), ErrorCode::kParse);
  EXPECT_EQ(code(head + start + "u,v,1,0.5,x,0\n"), ErrorCode::kParse);
  EXPECT_EQ(code(head + start + "u,v,1,0.5,1\n"), ErrorCode::kParse);
  EXPECT_EQ(code(head + start + Row("u", "v", 0.3, 0.5) + Row("u", "v", 1, 0.4)),
            ErrorCode::kParse);
  EXPECT_EQ(code(head + start + Row("u", "v", 1, 0.5) + Row("v", "u", 0, 1) + Row("v", "u", 1, 0.5)),
            ErrorCode::kParse);
}

TEST(Csv, WrongT0Rejected) {
  const Instance g = MakeHardInstance(2.0);
  const std::string csv = EstimateToCsv(HardEstimate());
  EXPECT_NO_THROW(EstimateFromCsv(csv, g, kT0));
  EXPECT_THROW(EstimateFromCsv(csv, g, 0.2), Error);
}

TEST(SelfConsistency, PolicyReproducesItsEstimate) {
  const Instance t = Reclassify(MakeTriangleInstance());
  const auto e = std::make_shared<GridEstimate>(Estimate(t, Opts(100000, 21)));
  RunOptions o;
  o.trials = 100000;
  o.seed = 22;
  o.threads = 2;
  const SimReport r = stochmatch::Run(t, GeneralizedPolicy(t, kT0, e), o);
  ASSERT_EQ(r.pairs.size(), e->pairs.size());
  for (const PairCurve& pc : r.pairs) {
    const std::size_t i = e->FindPair(pc.u, pc.v);
    ASSERT_NE(i, static_cast<std::size_t>(-1));
    const PairEstimate& p = e->pairs[i];
    for (std::size_t j = 0; j < r.grid.size(); ++j) {
      const double se = std::hypot(p.se[j], pc.both_unmatched_se[j]);
      EXPECT_NEAR(pc.both_unmatched[j], p.g_prime[j], kBand * se + 1e-12)
          << pc.u << "," << pc.v << " tau=" << r.grid[j];
    }
  }
}

}  // namespace
}  // namespace stochmatch
