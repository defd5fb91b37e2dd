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

// Poisson-arrival simulation of online matching policies on reduced
// instances.

#ifndef STOCHMATCH_SIMULATOR_H_
#define STOCHMATCH_SIMULATOR_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stochmatch/analytics.h"
#include "stochmatch/estimator.h"
#include "stochmatch/instance.h"

namespace stochmatch {

namespace internal {
struct CompiledInstance;
}  // namespace internal

struct ArrivalEvent {
  double t = 0.0;
  std::size_t type = 0;  // index into Instance::online()
};

// Merged-process sample on [0, 1]: Exp(Lambda) gaps, each event's type drawn
// with probability lambda_i / Lambda. `trial` selects the same arrival stream
// that Run uses for that trial index under `seed`.
std::vector<ArrivalEvent> SampleArrivals(const Instance& instance, std::uint64_t seed,
                                         std::uint64_t trial = 0);

// Snapshot handed to a policy on each arrival.
struct ArrivalContext {
  double t = 0.0;
  std::size_t type = 0;
  const std::uint8_t* matched = nullptr;  // one flag per offline vertex
};

// Probability of realizing each incident edge (in OnlineType::edges order);
// the alternatives are mutually exclusive.
using Proposal = std::array<double, 2>;

class Policy {
 public:
  virtual ~Policy();

  virtual std::string name() const = 0;
  virtual Proposal Propose(const ArrivalContext& arrival, DecisionStats& stats) const = 0;

  const internal::CompiledInstance& compiled() const { return *compiled_; }

 protected:
  explicit Policy(const Instance& instance);

  std::shared_ptr<const internal::CompiledInstance> compiled_;
};

// Optimal threshold policy on G: first-class arrivals always match; a
// second-class arrival matches a uniformly random free neighbor when both are
// free and t > t0, or the free one when exactly one is free and t > t1.
// The restricted policy is this with t1 = t0. Rejects instances that do not
// have the shape of G.
class ThresholdPolicy final : public Policy {
 public:
  ThresholdPolicy(const Instance& instance, const HardParams& params);
  static ThresholdPolicy Restricted(const Instance& instance, double t0);

  std::string name() const override;
  Proposal Propose(const ArrivalContext& arrival, DecisionStats& stats) const override;

 private:
  HardParams params_;
};

// Generalized algorithm (ratio ḡ(t) / ḡ_{u,v}(t) with ḡ_{u,v} from the grid
// estimate) or its auxiliary variant (ratio ḡ(t) / (2 f̄(t) - g'_{u,v}(t))
// under an explicit min{., 1}).
class GeneralizedPolicy final : public Policy {
 public:
  enum class Mode { kGeneralized, kAuxiliary };

  // `instance` must be reclassified; throws Error(kInvalidArgument) if the
  // estimate lacks a pair some two-edge type needs.
  GeneralizedPolicy(const Instance& instance, double t0,
                    std::shared_ptr<const GridEstimate> estimate,
                    Mode mode = Mode::kGeneralized);

  std::string name() const override;
  Proposal Propose(const ArrivalContext& arrival, DecisionStats& stats) const override;

 private:
  double t0_;
  std::shared_ptr<const GridEstimate> estimate_;
  Mode mode_;
  // Per online type, the estimate pair index of its two neighbors.
  std::vector<std::size_t> pair_of_type_;
};

// Suggested Matching: propose edge (i, j) with probability x_ij / lambda_i,
// discard if j is taken.
class SuggestedPolicy final : public Policy {
 public:
  explicit SuggestedPolicy(const Instance& instance);

  std::string name() const override;
  Proposal Propose(const ArrivalContext& arrival, DecisionStats& stats) const override;
};

struct RunOptions {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  double grid_step = 1e-2;
  unsigned threads = 0;
  // Track every offline pair, not only those sharing a two-edge type.
  bool all_pairs = false;
};

struct EdgeStat {
  std::string type;
  std::string offline;
  EdgeClass edge_class = EdgeClass::kFirst;
  double weight = 0.0;
  double x = 0.0;
  std::uint64_t count = 0;
  double frequency = 0.0;
  double se = 0.0;
};

struct VertexCurve {
  std::string id;
  std::vector<double> matched;  // empirical f_u(tau)
  std::vector<double> se;
};

struct PairCurve {
  std::string u;
  std::string v;
  std::vector<double> both_matched;    // g_{u,v}(tau)
  std::vector<double> both_unmatched;  // g'_{u,v}(tau)
  std::vector<double> both_matched_se;
  std::vector<double> both_unmatched_se;
};

struct SimReport {
  std::string policy;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  double mean_objective = 0.0;
  double objective_se = 0.0;
  std::vector<EdgeStat> edges;
  std::vector<VertexCurve> vertices;
  std::vector<PairCurve> pairs;
  DecisionStats decisions;
  // Arrivals whose proposal summed to more than 1 + 1e-12.
  std::uint64_t partition_violations = 0;
  // Realized edges whose offline endpoint was already matched (must be 0).
  std::uint64_t rematch_attempts = 0;
  std::uint64_t arrivals = 0;
  // Unmatched arrivals per grid interval (tau_{b-1}, tau_b]; index 0 unused.
  std::vector<std::uint64_t> discards_by_bin;
};

// Runs `trials` independent trajectories. Trial i draws from streams derived
// from (seed, i) alone, and every aggregate is reduced in trial-chunk order,
// so the report does not depend on the thread count.
SimReport Run(const Instance& instance, const Policy& policy, const RunOptions& options);

// Sections edges, vertices, pairs, summary in one long-format table.
std::string ReportToCsv(const SimReport& report);

}  // namespace stochmatch

#endif  // STOCHMATCH_SIMULATOR_H_
