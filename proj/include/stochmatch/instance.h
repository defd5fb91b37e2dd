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

// Reduced online stochastic matching instances: data model, JSON I/O,
// validation against the Jaillet-Lu LP constraints, and the edge
// reclassification that lifts every offline vertex to exactly 1 - ln 2 of
// first-class LP mass.

#ifndef STOCHMATCH_INSTANCE_H_
#define STOCHMATCH_INSTANCE_H_

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stochmatch {

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;
// Upper bound on first-class LP mass at an offline vertex.
inline constexpr double kFirstClassBudget = 1.0 - kLn2;
// Absolute tolerance for every equality constraint on an instance.
inline constexpr double kTolerance = 1e-9;

inline constexpr std::size_t kUnresolved = std::numeric_limits<std::size_t>::max();

enum class EdgeClass { kFirst, kSecond };

std::string_view ToString(EdgeClass c);
std::optional<EdgeClass> ParseEdgeClass(std::string_view s);

struct Edge {
  std::string to;
  // Index into Instance::offline(); kUnresolved when `to` names no vertex.
  std::size_t offline = kUnresolved;
  double weight = 0.0;
  double x = 0.0;
  EdgeClass edge_class = EdgeClass::kFirst;
};

struct OfflineVertex {
  std::string id;
  // First-class incident LP mass; derived, never read from input.
  double y = 0.0;
};

struct OnlineType {
  std::string id;
  double rate = 0.0;
  EdgeClass type_class = EdgeClass::kFirst;
  std::vector<Edge> edges;
};

// Immutable after construction. Edge references are resolved and y is
// recomputed on construction; unresolved references are kept so that
// Validate can report them.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<OfflineVertex> offline, std::vector<OnlineType> online);

  const std::vector<OfflineVertex>& offline() const { return offline_; }
  const std::vector<OnlineType>& online() const { return online_; }

  // Lambda: sum of all arrival rates.
  double total_rate() const { return total_rate_; }
  std::size_t edge_count() const;

  std::optional<std::size_t> FindOffline(std::string_view id) const;
  std::optional<std::size_t> FindOnline(std::string_view id) const;

 private:
  std::vector<OfflineVertex> offline_;
  std::vector<OnlineType> online_;
  double total_rate_ = 0.0;
};

struct Violation {
  std::string constraint;
  std::string id;
  double measured = 0.0;
  double bound = 0.0;
  std::string message;
};

// Empty iff every reduced-form and LP-feasibility condition holds.
std::vector<Violation> Validate(const Instance& instance);

// Throws Error(kValidation) carrying the first violations when invalid.
void RequireValid(const Instance& instance);

struct LoadResult {
  Instance instance;
  std::vector<std::string> warnings;
};

LoadResult LoadInstanceJson(std::string_view text);
LoadResult LoadInstanceFile(const std::string& path);
std::string ToJson(const Instance& instance);

// The hard instance G(k): offline {u, v}, a second-class type of rate
// 2 ln 2 with unit weights, and a first-class type of rate 1 - ln 2 and
// weight k at each offline vertex.
Instance MakeHardInstance(double k);

// G'(k): what remains of G(k) after one offline vertex is matched. Not a
// reduced instance; the surviving second-class type keeps its rate and
// fraction but has a single live edge.
Instance MakeSubInstance(double k);

// Reduced instance on a triangle A, B, C: second-class types on every side
// and first-class mass 1 - ln 2 at A and C but only 0.1 at B, so B needs
// reclassification.
Instance MakeTriangleInstance();

// `copies` vertex-disjoint copies; ids get the suffix ".c" for copy c.
Instance DisjointCopies(const Instance& instance, std::size_t copies);

// Optimal Jaillet-Lu LP value of G(k).
double HardLpValue(double k);

// Sum of w_ij * x_ij. For a reduced instance the embedded x is optimal.
double LpValue(const Instance& instance);

// Sum of arrival rates of the online types adjacent to offline vertex j.
double NeighborArrivalRate(const Instance& instance, std::size_t j);

struct IncidentMass {
  double first = 0.0;
  double second = 0.0;
};
IncidentMass IncidentLpMass(const Instance& instance, std::size_t j);

// Relabels (and, where a fraction of an edge is needed, splits) second-class
// edges so every offline vertex carries exactly 1 - ln 2 first-class mass.
// Offline vertices are processed in ascending id order and candidate edges
// in ascending online-type id order. A split type `i` becomes `i#1` (the
// part whose edge is relabelled) and `i#2`.
Instance Reclassify(const Instance& instance);

}  // namespace stochmatch

#endif  // STOCHMATCH_INSTANCE_H_
