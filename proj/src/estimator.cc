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

#include "stochmatch/estimator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "compiled.h"
#include "parallel.h"
#include "stochmatch/error.h"

namespace stochmatch {
namespace {

using internal::CompiledInstance;
using internal::CompiledType;
using internal::GridBin;
using internal::kNoPair;

constexpr std::uint64_t kMinEnsemble = 10000;
// Ensemble members wanted per estimated pair before SEs are inflated.
constexpr std::uint64_t kMembersPerPair = 10000;
constexpr std::size_t kChunk = 4096;

struct Member {
  SplitMix64 arrivals{0};
  SplitMix64 decisions{0};
  double t = 0.0;
  std::size_t type = 0;
  std::size_t bin = 0;
  bool done = false;
};

// Auxiliary-rule ratio for one pair, frozen over a grid interval.
struct Frozen {
  double ratio = 1.0;
  bool clamp = false;
  bool excess = false;
};

}  // namespace

std::size_t GridEstimate::FindPair(std::size_t u, std::size_t v) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if ((p.u_index == u && p.v_index == v) || (p.u_index == v && p.v_index == u)) return i;
  }
  return kNoPair;
}

std::size_t GridEstimate::FindPair(std::string_view u, std::string_view v) const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if ((p.u == u && p.v == v) || (p.u == v && p.v == u)) return i;
  }
  return kNoPair;
}

GridEstimate Estimate(const Instance& instance, const EstimateOptions& options) {
  RequireValid(instance);
  internal::RequireReclassified(instance);
  if (!(options.t0 >= 0.0 && options.t0 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "t0 must lie in [0, 1]");
  }
  if (!(options.grid_step >= 1e-4 - 1e-15 && options.grid_step <= 5e-2 + 1e-15)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must lie in [1e-4, 5e-2]");
  }
  if (options.ensemble_size < kMinEnsemble) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble size must be at least 10000");
  }
  const std::size_t m = internal::GridIntervals(options.grid_step);
  const CompiledInstance c = CompiledInstance::Build(instance, options.all_pairs);
  const std::size_t n = options.ensemble_size;
  const double nd = static_cast<double>(n);
  const std::size_t vertices = c.offline_count;
  const std::size_t npairs = c.pairs.size();

  GridEstimate est;
  est.t0 = options.t0;
  est.ensemble_size = n;
  est.seed = options.seed;
  for (std::size_t j = 0; j <= m; ++j) est.grid.push_back(static_cast<double>(j) / m);
  for (const auto& [u, v] : c.pairs) {
    PairEstimate p;
    p.u = instance.offline()[u].id;
    p.v = instance.offline()[v].id;
    p.u_index = u;
    p.v_index = v;
    est.pairs.push_back(std::move(p));
  }

  double se_scale = 1.0;
  if (npairs > 0 && n < kMembersPerPair * npairs) {
    se_scale = std::sqrt(static_cast<double>(kMembersPerPair * npairs) / nd);
    std::ostringstream os;
    os << "ensemble of " << n << " is small for " << npairs << " pairs (want "
       << kMembersPerPair * npairs << "); standard errors inflated by " << se_scale;
    est.warnings.push_back(os.str());
  }

  std::vector<std::uint8_t> matched(n * vertices, 0);
  std::vector<Member> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    Member& mb = members[i];
    mb.arrivals = internal::ArrivalStreamFor(options.seed, i);
    mb.decisions = internal::DecisionStreamFor(options.seed, i);
    mb.done = !c.NextArrival(mb.arrivals, mb.t, mb.type);
    if (!mb.done) mb.bin = GridBin(mb.t, m);
  }

  std::vector<double> g_prime(npairs, 1.0);
  auto record = [&](std::size_t j) {
    const ReferenceCurves ref = RestrictedReference(options.t0, est.grid[j]);
    for (std::size_t q = 0; q < npairs; ++q) {
      PairEstimate& p = est.pairs[q];
      const double g = g_prime[q];
      p.g_prime.push_back(g);
      p.g_bar_uv.push_back(2.0 * ref.f_single_bar - g);
      p.se.push_back(se_scale * std::sqrt(std::max(g * (1.0 - g), 0.0) / nd));
    }
  };
  record(0);

  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Frozen> frozen(npairs);
  std::mutex mu;
  for (std::size_t j = 0; j < m; ++j) {
    const ReferenceCurves ref = RestrictedReference(options.t0, est.grid[j]);
    for (std::size_t q = 0; q < npairs; ++q) {
      const double den = 2.0 * ref.f_single_bar - g_prime[q];
      const double raw = den > 0.0 ? ref.g_bar / den : std::numeric_limits<double>::infinity();
      frozen[q].clamp = raw > 1.0;
      frozen[q].excess = ref.g_bar - den > 3.0 * est.pairs[q].se[j];
      frozen[q].ratio = std::min(raw, 1.0);
    }
    const std::size_t bin = j + 1;
    std::vector<std::uint64_t> unmatched(npairs, 0);

    internal::ParallelFor(chunks, options.threads, [&](std::size_t chunk) {
      DecisionStats stats;
      std::vector<std::uint64_t> local(npairs, 0);
      const std::size_t end = std::min(n, (chunk + 1) * kChunk);
      for (std::size_t i = chunk * kChunk; i < end; ++i) {
        Member& mb = members[i];
        std::uint8_t* mt = &matched[i * vertices];
        while (!mb.done && mb.bin <= bin) {
          const CompiledType& type = c.types[mb.type];
          std::array<double, 2> p{0.0, 0.0};
          for (std::size_t e = 0; e < type.edges; ++e) {
            const std::size_t u = type.offline[e];
            if (mt[u]) continue;
            if (type.edges == 1) {
              p[e] = 1.0;
            } else if (type.edge_class[e] == EdgeClass::kFirst) {
              p[e] = 0.5;
            } else if (mb.t > options.t0) {
              const Frozen& f = frozen[type.pair];
              ++stats.second_class_decisions;
              stats.clamps += f.clamp ? 1 : 0;
              stats.excess_clamps += f.excess ? 1 : 0;
              p[e] = mt[type.offline[1 - e]] ? f.ratio : 0.5 * f.ratio;
            }
          }
          const double r = mb.decisions.Uniform();
          if (r < p[0]) {
            mt[type.offline[0]] = 1;
          } else if (type.edges == 2 && r < p[0] + p[1]) {
            mt[type.offline[1]] = 1;
          }
          mb.done = !c.NextArrival(mb.arrivals, mb.t, mb.type);
          if (!mb.done) mb.bin = GridBin(mb.t, m);
        }
        for (std::size_t q = 0; q < npairs; ++q) {
          const auto [u, v] = c.pairs[q];
          if (!mt[u] && !mt[v]) ++local[q];
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      est.stats += stats;
      for (std::size_t q = 0; q < npairs; ++q) unmatched[q] += local[q];
    });

    for (std::size_t q = 0; q < npairs; ++q) {
      g_prime[q] = static_cast<double>(unmatched[q]) / nd;
    }
    record(bin);
  }
  return est;
}

PairLookup Lookup(const GridEstimate& estimate, std::size_t pair, double t,
                  const ReferenceCurves& reference) {
  if (pair >= estimate.pairs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown pair index " + std::to_string(pair));
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lookup time must lie in [0, 1]");
  }
  const std::size_t m = estimate.intervals();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "empty grid estimate");
  const PairEstimate& p = estimate.pairs[pair];
  const double pos = t * static_cast<double>(m);
  const std::size_t lo = std::min(static_cast<std::size_t>(pos), m - 1);
  const double w = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);

  PairLookup out;
  out.g_prime = std::clamp((1.0 - w) * p.g_prime[lo] + w * p.g_prime[lo + 1], 0.0, 1.0);
  out.se = (1.0 - w) * p.se[lo] + w * p.se[lo + 1];
  out.g_bar_uv = 2.0 * reference.f_single_bar - out.g_prime;
  if (out.g_bar_uv < reference.g_bar) {
    out.g_bar_uv = reference.g_bar;
    out.floored = true;
  }
  return out;
}

PairLookup Lookup(const GridEstimate& estimate, std::size_t pair, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lookup time must lie in [0, 1]");
  }
  return Lookup(estimate, pair, t, RestrictedReference(estimate.t0, t));
}

PairLookup Lookup(const GridEstimate& estimate, std::string_view u, std::string_view v,
                  double t) {
  const std::size_t pair = estimate.FindPair(u, v);
  if (pair == kNoPair) {
    throw Error(ErrorCode::kInvalidArgument,
                "no estimate for pair (" + std::string(u) + ", " + std::string(v) + ")");
  }
  return Lookup(estimate, pair, t);
}

std::string EstimateToCsv(const GridEstimate& estimate) {
  std::ostringstream os;
  os.precision(17);
  os << "pair_u,pair_v,tau,g_prime,g_bar_uv,se\n";
  for (const auto& p : estimate.pairs) {
    for (std::size_t j = 0; j < estimate.grid.size(); ++j) {
      os << p.u << ',' << p.v << ',' << estimate.grid[j] << ',' << p.g_prime[j] << ','
         << p.g_bar_uv[j] << ',' << p.se[j] << '\n';
    }
  }
  return os.str();
}

GridEstimate EstimateFromCsv(std::string_view csv, const Instance& instance, double t0) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParse, "estimate csv line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) fail("empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "pair_u,pair_v,tau,g_prime,g_bar_uv,se") fail("unexpected header");

  struct Row {
    double tau, g_prime, g_bar_uv, se;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Row>> rows;
  std::vector<std::pair<std::size_t, std::size_t>> order;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) fail("expected 6 columns");
    const auto u = instance.FindOffline(cells[0]);
    const auto v = instance.FindOffline(cells[1]);
    if (!u || !v) fail("unknown offline vertex");
    if (*u == *v) fail("pair with identical endpoints");
    Row r{};
    try {
      r.tau = std::stod(cells[2]);
      r.g_prime = std::stod(cells[3]);
      r.g_bar_uv = std::stod(cells[4]);
      r.se = std::stod(cells[5]);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    if (!(r.g_prime >= 0.0 && r.g_prime <= 1.0)) fail("g_prime outside [0, 1]");
    if (!(r.se >= 0.0)) fail("negative se");
    const auto key = std::make_pair(*u, *v);
    if (!rows.count(key)) order.push_back(key);
    rows[key].push_back(r);
  }
  if (order.empty()) fail("no rows");

  GridEstimate est;
  est.t0 = t0;
  const auto& first = rows[order.front()];
  for (const Row& r : first) est.grid.push_back(r.tau);
  const std::size_t m = est.grid.size() - 1;
  if (m == 0) fail("grid needs at least two points");
  for (std::size_t j = 0; j <= m; ++j) {
    if (std::abs(est.grid[j] - static_cast<double>(j) / m) > 1e-9) fail("grid is not uniform on [0, 1]");
    est.grid[j] = static_cast<double>(j) / m;
  }
  for (const auto& key : order) {
    const auto& rs = rows[key];
    if (rs.size() != m + 1) fail("pair has a different grid length");
    PairEstimate p;
    p.u_index = key.first;
    p.v_index = key.second;
    p.u = instance.offline()[key.first].id;
    p.v = instance.offline()[key.second].id;
    for (std::size_t j = 0; j <= m; ++j) {
      if (std::abs(rs[j].tau - est.grid[j]) > 1e-9) fail("pair grid mismatch");
      const ReferenceCurves ref = RestrictedReference(t0, est.grid[j]);
      const double g_bar_uv = 2.0 * ref.f_single_bar - rs[j].g_prime;
      // g_bar_uv depends on t0; a mismatch means the file was made for another t0.
      if (std::abs(rs[j].g_bar_uv - g_bar_uv) > 1e-9) fail("g_bar_uv inconsistent with t0");
      p.g_prime.push_back(rs[j].g_prime);
      p.g_bar_uv.push_back(g_bar_uv);
      p.se.push_back(rs[j].se);
    }
    if (est.FindPair(key.first, key.second) != kNoPair) fail("duplicate pair");
    est.pairs.push_back(std::move(p));
  }
  return est;
}

}  // namespace stochmatch
