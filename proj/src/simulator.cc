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

#include "stochmatch/simulator.h"

#include <cmath>
#include <limits>
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

constexpr std::uint64_t kChunkTrials = 4096;
constexpr double kPartitionSlack = 1e-12;

double ProportionSe(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// Integer tallies of one chunk of trials; merging is order-free.
struct Tally {
  std::vector<std::uint64_t> edge_counts;
  std::vector<std::uint64_t> vertex_bins;  // [vertex][bin]
  std::vector<std::uint64_t> both_bins;    // [pair][bin] of the later match
  std::vector<std::uint64_t> any_bins;     // [pair][bin] of the earlier match
  std::vector<std::uint64_t> discards;
  std::uint64_t arrivals = 0;
  std::uint64_t partition_violations = 0;
  std::uint64_t rematch_attempts = 0;
  DecisionStats stats;

  Tally(std::size_t edges, std::size_t vertices, std::size_t pairs, std::size_t bins)
      : edge_counts(edges),
        vertex_bins(vertices * bins),
        both_bins(pairs * bins),
        any_bins(pairs * bins),
        discards(bins) {}

  void Merge(const Tally& o) {
    auto add = [](std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(edge_counts, o.edge_counts);
    add(vertex_bins, o.vertex_bins);
    add(both_bins, o.both_bins);
    add(any_bins, o.any_bins);
    add(discards, o.discards);
    arrivals += o.arrivals;
    partition_violations += o.partition_violations;
    rematch_attempts += o.rematch_attempts;
    stats += o.stats;
  }
};

}  // namespace

Policy::~Policy() = default;

Policy::Policy(const Instance& instance)
    : compiled_(std::make_shared<const CompiledInstance>(CompiledInstance::Build(instance))) {}

std::vector<ArrivalEvent> SampleArrivals(const Instance& instance, std::uint64_t seed,
                                         std::uint64_t trial) {
  const CompiledInstance c = CompiledInstance::Build(instance);
  SplitMix64 rng = internal::ArrivalStreamFor(seed, trial);
  std::vector<ArrivalEvent> events;
  double t = 0.0;
  std::size_t type = 0;
  while (c.NextArrival(rng, t, type)) events.push_back({t, type});
  return events;
}

// --- ThresholdPolicy -------------------------------------------------------

ThresholdPolicy::ThresholdPolicy(const Instance& instance, const HardParams& params)
    : Policy(instance), params_(params) {
  params_.Check();
  const CompiledInstance& c = *compiled_;
  bool shape_ok = c.offline_count == 2;
  for (const CompiledType& type : c.types) {
    const bool first = type.type_class == EdgeClass::kFirst && type.edges == 1;
    const bool second = type.type_class == EdgeClass::kSecond && type.edges == 2 &&
                        type.offline[0] != type.offline[1];
    shape_ok = shape_ok && (first || second);
  }
  if (!shape_ok) {
    throw Error(ErrorCode::kInvalidArgument,
                "threshold policies need an instance shaped like G: two offline "
                "vertices, single-edge first-class types, two-edge second-class types");
  }
}

ThresholdPolicy ThresholdPolicy::Restricted(const Instance& instance, double t0) {
  return ThresholdPolicy(instance, HardParams{1.0, t0, t0});
}

std::string ThresholdPolicy::name() const {
  return params_.t0 == params_.t1 ? "restricted" : "optimal-g";
}

Proposal ThresholdPolicy::Propose(const ArrivalContext& arrival, DecisionStats&) const {
  const CompiledType& type = compiled_->types[arrival.type];
  Proposal p{0.0, 0.0};
  if (type.edges == 1) {
    if (!arrival.matched[type.offline[0]]) p[0] = 1.0;
    return p;
  }
  const bool free0 = !arrival.matched[type.offline[0]];
  const bool free1 = !arrival.matched[type.offline[1]];
  if (free0 && free1) {
    if (arrival.t > params_.t0) p = {0.5, 0.5};
  } else if (free0 || free1) {
    if (arrival.t > params_.t1) p[free0 ? 0 : 1] = 1.0;
  }
  return p;
}

// --- GeneralizedPolicy -----------------------------------------------------

GeneralizedPolicy::GeneralizedPolicy(const Instance& instance, double t0,
                                     std::shared_ptr<const GridEstimate> estimate,
                                     Mode mode)
    : Policy(instance), t0_(t0), estimate_(std::move(estimate)), mode_(mode) {
  if (!(t0 >= 0.0 && t0 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "t0 must lie in [0, 1]");
  }
  if (!estimate_) throw Error(ErrorCode::kInvalidArgument, "missing grid estimate");
  internal::RequireReclassified(instance);
  const CompiledInstance& c = *compiled_;
  pair_of_type_.assign(c.types.size(), internal::kNoPair);
  for (std::size_t i = 0; i < c.types.size(); ++i) {
    const CompiledType& type = c.types[i];
    if (type.edges != 2) continue;
    const std::size_t pair = estimate_->FindPair(type.offline[0], type.offline[1]);
    if (pair == internal::kNoPair) {
      throw Error(ErrorCode::kInvalidArgument,
                  "grid estimate has no entry for pair (" +
                      instance.offline()[type.offline[0]].id + ", " +
                      instance.offline()[type.offline[1]].id + ")");
    }
    pair_of_type_[i] = pair;
  }
}

std::string GeneralizedPolicy::name() const {
  return mode_ == Mode::kGeneralized ? "generalized" : "auxiliary";
}

Proposal GeneralizedPolicy::Propose(const ArrivalContext& arrival, DecisionStats& stats) const {
  const CompiledType& type = compiled_->types[arrival.type];
  Proposal p{0.0, 0.0};
  if (type.edges == 1) {
    if (!arrival.matched[type.offline[0]]) p[0] = 1.0;
    return p;
  }

  bool have_ratio = false;
  double ratio = 0.0;
  DecisionStats per_decision;
  for (std::size_t e = 0; e < 2; ++e) {
    const std::size_t j = type.offline[e];
    if (arrival.matched[j]) continue;
    if (type.edge_class[e] == EdgeClass::kFirst) {
      p[e] = 0.5;
      continue;
    }
    if (arrival.t <= t0_) continue;

    if (!have_ratio) {
      have_ratio = true;
      const ReferenceCurves ref = RestrictedReference(t0_, arrival.t);
      const PairLookup lk = Lookup(*estimate_, pair_of_type_[arrival.type], arrival.t, ref);
      if (mode_ == Mode::kGeneralized) {
        ratio = ref.g_bar / lk.g_bar_uv;
        per_decision.floors = lk.floored ? 1 : 0;
      } else {
        const double denominator = 2.0 * ref.f_single_bar - lk.g_prime;
        const double raw = denominator > 0.0 ? ref.g_bar / denominator
                                             : std::numeric_limits<double>::infinity();
        if (raw > 1.0) {
          per_decision.clamps = 1;
          per_decision.excess_clamps = ref.g_bar - denominator > 3.0 * lk.se ? 1 : 0;
        }
        ratio = std::min(raw, 1.0);
      }
    }
    ++stats.second_class_decisions;
    stats.floors += per_decision.floors;
    stats.clamps += per_decision.clamps;
    stats.excess_clamps += per_decision.excess_clamps;
    const bool partner_matched = arrival.matched[type.offline[1 - e]] != 0;
    p[e] = partner_matched ? ratio : 0.5 * ratio;
  }
  return p;
}

// --- SuggestedPolicy -------------------------------------------------------

SuggestedPolicy::SuggestedPolicy(const Instance& instance) : Policy(instance) {}

std::string SuggestedPolicy::name() const { return "suggested"; }

Proposal SuggestedPolicy::Propose(const ArrivalContext& arrival, DecisionStats&) const {
  const CompiledType& type = compiled_->types[arrival.type];
  Proposal p{0.0, 0.0};
  for (std::size_t e = 0; e < type.edges; ++e) {
    if (!arrival.matched[type.offline[e]] && type.rate > 0.0) p[e] = type.x[e] / type.rate;
  }
  return p;
}

// --- Run -------------------------------------------------------------------

SimReport Run(const Instance& instance, const Policy& policy, const RunOptions& options) {
  if (options.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  const CompiledInstance& c = policy.compiled();
  if (c.offline_count != instance.offline().size() ||
      c.types.size() != instance.online().size()) {
    throw Error(ErrorCode::kInvalidArgument, "policy was built for a different instance");
  }
  const std::size_t m = internal::GridIntervals(options.grid_step);
  const std::size_t bins = m + 1;
  const std::size_t vertices = c.offline_count;

  std::vector<std::pair<std::size_t, std::size_t>> pairs = c.pairs;
  if (options.all_pairs) {
    pairs.clear();
    for (std::size_t u = 0; u < vertices; ++u) {
      for (std::size_t v = u + 1; v < vertices; ++v) pairs.emplace_back(u, v);
    }
  }

  const std::uint64_t chunks = (options.trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<double> chunk_sum(chunks, 0.0);
  std::vector<double> chunk_sumsq(chunks, 0.0);
  Tally total(c.edge_count, vertices, pairs.size(), bins);
  std::mutex total_mu;

  internal::ParallelFor(chunks, options.threads, [&](std::size_t chunk) {
    Tally tally(c.edge_count, vertices, pairs.size(), bins);
    std::vector<std::uint8_t> matched(vertices);
    std::vector<double> match_time(vertices);
    double sum = 0.0;
    double sumsq = 0.0;
    const std::uint64_t begin = chunk * kChunkTrials;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kChunkTrials, options.trials);
    for (std::uint64_t trial = begin; trial < end; ++trial) {
      std::fill(matched.begin(), matched.end(), 0);
      SplitMix64 arrivals = internal::ArrivalStreamFor(options.seed, trial);
      SplitMix64 decisions = internal::DecisionStreamFor(options.seed, trial);
      double objective = 0.0;
      double t = 0.0;
      std::size_t type_index = 0;
      while (c.NextArrival(arrivals, t, type_index)) {
        ++tally.arrivals;
        const CompiledType& type = c.types[type_index];
        const Proposal p =
            policy.Propose({t, type_index, matched.data()}, tally.stats);
        double mass = 0.0;
        for (std::size_t e = 0; e < type.edges; ++e) mass += p[e];
        if (mass > 1.0 + kPartitionSlack) ++tally.partition_violations;

        const double u = decisions.Uniform();
        double acc = 0.0;
        std::size_t chosen = type.edges;
        for (std::size_t e = 0; e < type.edges; ++e) {
          acc += p[e];
          if (u < acc) {
            chosen = e;
            break;
          }
        }
        if (chosen == type.edges) {
          ++tally.discards[GridBin(t, m)];
          continue;
        }
        const std::size_t j = type.offline[chosen];
        if (matched[j]) {
          ++tally.rematch_attempts;
          ++tally.discards[GridBin(t, m)];
          continue;
        }
        matched[j] = 1;
        match_time[j] = t;
        ++tally.edge_counts[type.edge_index[chosen]];
        objective += type.weight[chosen];
      }

      for (std::size_t j = 0; j < vertices; ++j) {
        if (matched[j]) ++tally.vertex_bins[j * bins + GridBin(match_time[j], m)];
      }
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        const auto [u, v] = pairs[q];
        if (matched[u] && matched[v]) {
          ++tally.both_bins[q * bins + GridBin(std::max(match_time[u], match_time[v]), m)];
        }
        if (matched[u] || matched[v]) {
          const double first = !matched[u]   ? match_time[v]
                               : !matched[v] ? match_time[u]
                                             : std::min(match_time[u], match_time[v]);
          ++tally.any_bins[q * bins + GridBin(first, m)];
        }
      }
      sum += objective;
      sumsq += objective * objective;
    }
    chunk_sum[chunk] = sum;
    chunk_sumsq[chunk] = sumsq;
    std::lock_guard<std::mutex> lock(total_mu);
    total.Merge(tally);
  });

  const std::uint64_t n = options.trials;
  const double nd = static_cast<double>(n);
  SimReport report;
  report.policy = policy.name();
  report.trials = n;
  report.seed = options.seed;
  for (std::size_t b = 0; b <= m; ++b) report.grid.push_back(static_cast<double>(b) / m);

  double objective_total = 0.0;
  const auto& online = instance.online();
  for (std::size_t i = 0; i < online.size(); ++i) {
    const CompiledType& type = c.types[i];
    for (std::size_t e = 0; e < type.edges; ++e) {
      EdgeStat s;
      s.type = online[i].id;
      s.offline = online[i].edges[e].to;
      s.edge_class = type.edge_class[e];
      s.weight = type.weight[e];
      s.x = type.x[e];
      s.count = total.edge_counts[type.edge_index[e]];
      s.frequency = static_cast<double>(s.count) / nd;
      s.se = ProportionSe(s.frequency, n);
      objective_total += s.weight * static_cast<double>(s.count);
      report.edges.push_back(std::move(s));
    }
  }
  report.mean_objective = objective_total / nd;
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::uint64_t k = 0; k < chunks; ++k) {
    sum += chunk_sum[k];
    sumsq += chunk_sumsq[k];
  }
  if (n > 1) {
    const double mean = sum / nd;
    const double var = std::max(sumsq - nd * mean * mean, 0.0) / (nd - 1.0);
    report.objective_se = std::sqrt(var / nd);
  }

  for (std::size_t j = 0; j < vertices; ++j) {
    VertexCurve curve;
    curve.id = instance.offline()[j].id;
    std::uint64_t cum = 0;
    for (std::size_t b = 0; b <= m; ++b) {
      cum += total.vertex_bins[j * bins + b];
      const double f = static_cast<double>(cum) / nd;
      curve.matched.push_back(f);
      curve.se.push_back(ProportionSe(f, n));
    }
    report.vertices.push_back(std::move(curve));
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    PairCurve curve;
    curve.u = instance.offline()[pairs[q].first].id;
    curve.v = instance.offline()[pairs[q].second].id;
    std::uint64_t both = 0;
    std::uint64_t any = 0;
    for (std::size_t b = 0; b <= m; ++b) {
      both += total.both_bins[q * bins + b];
      any += total.any_bins[q * bins + b];
      const double g = static_cast<double>(both) / nd;
      const double gp = 1.0 - static_cast<double>(any) / nd;
      curve.both_matched.push_back(g);
      curve.both_unmatched.push_back(gp);
      curve.both_matched_se.push_back(ProportionSe(g, n));
      curve.both_unmatched_se.push_back(ProportionSe(gp, n));
    }
    report.pairs.push_back(std::move(curve));
  }
  report.decisions = total.stats;
  report.partition_violations = total.partition_violations;
  report.rematch_attempts = total.rematch_attempts;
  report.arrivals = total.arrivals;
  report.discards_by_bin = total.discards;
  return report;
}

std::string ReportToCsv(const SimReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "section,type,offline,partner,class,weight,x,tau,metric,value,se\n";
  for (const auto& e : r.edges) {
    os << "edges," << e.type << ',' << e.offline << ",," << ToString(e.edge_class) << ','
       << e.weight << ',' << e.x << ",,match_frequency," << e.frequency << ',' << e.se
       << '\n';
  }
  for (const auto& v : r.vertices) {
    for (std::size_t b = 0; b < r.grid.size(); ++b) {
      os << "vertices,," << v.id << ",,,,," << r.grid[b] << ",f_u," << v.matched[b] << ','
         << v.se[b] << '\n';
    }
  }
  for (const auto& p : r.pairs) {
    for (std::size_t b = 0; b < r.grid.size(); ++b) {
      os << "pairs,," << p.u << ',' << p.v << ",,,," << r.grid[b] << ",g_uv,"
         << p.both_matched[b] << ',' << p.both_matched_se[b] << '\n';
      os << "pairs,," << p.u << ',' << p.v << ",,,," << r.grid[b] << ",g_prime_uv,"
         << p.both_unmatched[b] << ',' << p.both_unmatched_se[b] << '\n';
    }
  }
  auto summary = [&](const char* metric, double value, double se) {
    os << "summary,,,,,,,," << metric << ',' << value << ',' << se << '\n';
  };
  auto count = [&](const char* metric, std::uint64_t value) {
    os << "summary,,,,,,,," << metric << ',' << value << ",\n";
  };
  count("trials", r.trials);
  count("seed", r.seed);
  summary("mean_objective", r.mean_objective, r.objective_se);
  count("arrivals", r.arrivals);
  count("second_class_decisions", r.decisions.second_class_decisions);
  count("clamps", r.decisions.clamps);
  count("excess_clamps", r.decisions.excess_clamps);
  count("floors", r.decisions.floors);
  count("partition_violations", r.partition_violations);
  count("rematch_attempts", r.rematch_attempts);
  return os.str();
}

}  // namespace stochmatch
