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

#include "compiled.h"

#include <string>

#include "stochmatch/error.h"

namespace stochmatch::internal {

CompiledInstance CompiledInstance::Build(const Instance& instance, bool all_pairs) {
  CompiledInstance c;
  c.offline_count = instance.offline().size();
  c.total_rate = instance.total_rate();
  double running = 0.0;
  std::size_t edge_number = 0;
  for (const auto& type : instance.online()) {
    if (type.edges.empty() || type.edges.size() > 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "online type \"" + type.id + "\" must have one or two edges");
    }
    CompiledType ct;
    ct.type_class = type.type_class;
    ct.edges = type.edges.size();
    ct.rate = type.rate;
    for (std::size_t e = 0; e < ct.edges; ++e) {
      const Edge& edge = type.edges[e];
      if (edge.offline == kUnresolved) {
        throw Error(ErrorCode::kInvalidArgument,
                    "edge " + type.id + "->" + edge.to + " has no offline endpoint");
      }
      ct.offline[e] = edge.offline;
      ct.edge_class[e] = edge.edge_class;
      ct.weight[e] = edge.weight;
      ct.x[e] = edge.x;
      ct.edge_index[e] = edge_number++;
    }
    running += type.rate;
    c.cumulative_rate.push_back(running);
    c.types.push_back(ct);
  }
  c.edge_count = edge_number;

  if (all_pairs) {
    for (std::size_t u = 0; u < c.offline_count; ++u) {
      for (std::size_t v = u + 1; v < c.offline_count; ++v) c.pairs.emplace_back(u, v);
    }
  } else {
    for (const auto& ct : c.types) {
      if (ct.edges != 2) continue;
      c.pairs.emplace_back(std::min(ct.offline[0], ct.offline[1]),
                           std::max(ct.offline[0], ct.offline[1]));
    }
    std::sort(c.pairs.begin(), c.pairs.end());
    c.pairs.erase(std::unique(c.pairs.begin(), c.pairs.end()), c.pairs.end());
  }
  for (auto& ct : c.types) {
    if (ct.edges == 2) ct.pair = c.FindPair(ct.offline[0], ct.offline[1]);
  }
  return c;
}

void RequireReclassified(const Instance& instance) {
  for (const auto& v : instance.offline()) {
    if (std::abs(v.y - kFirstClassBudget) > kTolerance) {
      throw Error(ErrorCode::kInvalidArgument,
                  "instance is not reclassified: offline \"" + v.id + "\" has y = " +
                      std::to_string(v.y));
    }
  }
}

std::size_t GridIntervals(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must lie in (0, 1]");
  }
  const double m = std::round(1.0 / grid_step);
  if (std::abs(m * grid_step - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid step " + std::to_string(grid_step) + " does not divide [0, 1]");
  }
  return static_cast<std::size_t>(m);
}

}  // namespace stochmatch::internal
