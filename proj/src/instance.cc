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

#include "stochmatch/instance.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "stochmatch/error.h"

namespace stochmatch {
namespace {

using nlohmann::json;

void Report(std::vector<Violation>& out, std::string constraint, std::string id,
            double measured, double bound, std::string message) {
  out.push_back({std::move(constraint), std::move(id), measured, bound,
                 std::move(message)});
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double RequireNumber(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::kParse,
                where + ": missing or non-numeric \"" + key + "\"");
  }
  return it->get<double>();
}

std::string RequireString(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::kParse,
                where + ": missing or non-string \"" + key + "\"");
  }
  return it->get<std::string>();
}

EdgeClass RequireClass(const std::string& s, const std::string& where) {
  auto c = ParseEdgeClass(s);
  if (!c) {
    throw Error(ErrorCode::kParse,
                where + ": class must be \"first\" or \"second\", got \"" + s + "\"");
  }
  return *c;
}

}  // namespace

std::string_view ToString(EdgeClass c) {
  return c == EdgeClass::kFirst ? "first" : "second";
}

std::optional<EdgeClass> ParseEdgeClass(std::string_view s) {
  if (s == "first") return EdgeClass::kFirst;
  if (s == "second") return EdgeClass::kSecond;
  return std::nullopt;
}

Instance::Instance(std::vector<OfflineVertex> offline, std::vector<OnlineType> online)
    : offline_(std::move(offline)), online_(std::move(online)) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t j = 0; j < offline_.size(); ++j) {
    index.emplace(offline_[j].id, j);
    offline_[j].y = 0.0;
  }
  for (auto& type : online_) {
    total_rate_ += type.rate;
    for (auto& e : type.edges) {
      auto it = index.find(e.to);
      e.offline = it == index.end() ? kUnresolved : it->second;
      if (e.offline != kUnresolved && e.edge_class == EdgeClass::kFirst) {
        offline_[e.offline].y += e.x;
      }
    }
  }
}

std::size_t Instance::edge_count() const {
  std::size_t n = 0;
  for (const auto& type : online_) n += type.edges.size();
  return n;
}

std::optional<std::size_t> Instance::FindOffline(std::string_view id) const {
  for (std::size_t j = 0; j < offline_.size(); ++j) {
    if (offline_[j].id == id) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> Instance::FindOnline(std::string_view id) const {
  for (std::size_t i = 0; i < online_.size(); ++i) {
    if (online_[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<Violation> Validate(const Instance& instance) {
  std::vector<Violation> out;
  const auto& offline = instance.offline();
  const auto& online = instance.online();

  std::set<std::string> seen;
  for (const auto& v : offline) {
    if (!seen.insert(v.id).second) {
      Report(out, "duplicate_id", v.id, 0, 0, "offline id appears more than once");
    }
  }
  seen.clear();
  for (const auto& type : online) {
    if (!seen.insert(type.id).second) {
      Report(out, "duplicate_id", type.id, 0, 0, "online id appears more than once");
    }
  }

  std::vector<double> x_j(offline.size(), 0.0);
  std::vector<double> concentration(offline.size(), 0.0);

  for (const auto& type : online) {
    if (!(type.rate >= 0.0)) {
      Report(out, "negative_value", type.id, type.rate, 0.0, "rate must be nonnegative");
    }
    const std::size_t want =
        type.type_class == EdgeClass::kFirst ? std::size_t{1} : std::size_t{2};
    if (type.edges.size() != want) {
      Report(out, "edge_count", type.id, static_cast<double>(type.edges.size()),
             static_cast<double>(want),
             std::string(ToString(type.type_class)) + "-class type needs " +
                 std::to_string(want) + " edge(s)");
    }
    const double share =
        type.type_class == EdgeClass::kFirst ? type.rate : type.rate / 2.0;
    double x_i = 0.0;
    for (const auto& e : type.edges) {
      const std::string eid = type.id + "->" + e.to;
      x_i += e.x;
      if (!(e.weight >= 0.0)) {
        Report(out, "negative_value", eid, e.weight, 0.0, "weight must be nonnegative");
      }
      if (!(e.x >= 0.0)) {
        Report(out, "negative_value", eid, e.x, 0.0, "x must be nonnegative");
      }
      if (std::abs(e.x - share) > kTolerance) {
        Report(out, "type_fraction", eid, e.x, share,
               "x = " + Fmt(e.x) + " but " + std::string(ToString(type.type_class)) +
                   "-class type requires " + Fmt(share));
      }
      if (type.type_class == EdgeClass::kFirst && e.edge_class == EdgeClass::kSecond) {
        Report(out, "edge_class", eid, 0, 0,
               "second-class edge on a first-class type");
      }
      if (e.offline == kUnresolved) {
        Report(out, "unknown_offline", eid, 0, 0,
               "edge points to unknown offline id \"" + e.to + "\"");
        continue;
      }
      x_j[e.offline] += e.x;
      concentration[e.offline] += std::max(2.0 * e.x - type.rate, 0.0);
    }
    if (type.edges.size() == 2 && type.edges[0].to == type.edges[1].to) {
      Report(out, "distinct_neighbors", type.id, 0, 0,
             "second-class type must have two distinct neighbors");
    }
    if (x_i > type.rate + kTolerance) {
      Report(out, "online_capacity", type.id, x_i, type.rate,
             "sum_j x_ij = " + Fmt(x_i) + " exceeds rate " + Fmt(type.rate));
    }
  }

  for (std::size_t j = 0; j < offline.size(); ++j) {
    const auto& id = offline[j].id;
    if (std::abs(x_j[j] - 1.0) > kTolerance) {
      Report(out, "offline_full", id, x_j[j], 1.0,
             "x_j = " + Fmt(x_j[j]) + " != 1");
    }
    if (concentration[j] > kFirstClassBudget + kTolerance) {
      Report(out, "lp_concentration", id, concentration[j], kFirstClassBudget,
             "sum_i max{2x_ij - lambda_i, 0} = " + Fmt(concentration[j]) +
                 " > 1 - ln 2");
    }
    if (offline[j].y > kFirstClassBudget + kTolerance) {
      Report(out, "first_class_mass", id, offline[j].y, kFirstClassBudget,
             "y_j = " + Fmt(offline[j].y) + " > 1 - ln 2");
    }
  }
  return out;
}

void RequireValid(const Instance& instance) {
  auto violations = Validate(instance);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
    msg += " [" + violations[i].constraint + " " + violations[i].id + ": " +
           violations[i].message + "]";
  }
  if (violations.size() > 5) {
    msg += " (+" + std::to_string(violations.size() - 5) + " more)";
  }
  throw Error(ErrorCode::kValidation, msg);
}

LoadResult LoadInstanceJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed instance JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("offline") || !doc.contains("online") ||
      !doc["offline"].is_array() || !doc["online"].is_array()) {
    throw Error(ErrorCode::kParse,
                "instance JSON needs array fields \"offline\" and \"online\"");
  }

  LoadResult result;
  std::vector<OfflineVertex> offline;
  std::set<std::string> offline_ids;
  for (const auto& v : doc["offline"]) {
    if (!v.is_object()) throw Error(ErrorCode::kParse, "offline entry is not an object");
    std::string id = RequireString(v, "id", "offline vertex");
    if (!offline_ids.insert(id).second) {
      throw Error(ErrorCode::kParse, "duplicate offline id \"" + id + "\"");
    }
    offline.push_back({std::move(id), 0.0});
  }

  std::vector<OnlineType> online;
  std::set<std::string> online_ids;
  for (const auto& t : doc["online"]) {
    if (!t.is_object()) throw Error(ErrorCode::kParse, "online entry is not an object");
    OnlineType type;
    type.id = RequireString(t, "id", "online type");
    const std::string where = "online type \"" + type.id + "\"";
    if (!online_ids.insert(type.id).second) {
      throw Error(ErrorCode::kParse, "duplicate online id \"" + type.id + "\"");
    }
    type.rate = RequireNumber(t, "rate", where);
    type.type_class = RequireClass(RequireString(t, "class", where), where);
    if (!t.contains("edges") || !t["edges"].is_array()) {
      throw Error(ErrorCode::kParse, where + ": missing \"edges\" array");
    }
    for (const auto& e : t["edges"]) {
      if (!e.is_object()) throw Error(ErrorCode::kParse, where + ": edge is not an object");
      Edge edge;
      edge.to = RequireString(e, "to", where);
      edge.weight = RequireNumber(e, "weight", where);
      edge.x = RequireNumber(e, "x", where);
      edge.edge_class = e.contains("edge_class")
                            ? RequireClass(RequireString(e, "edge_class", where), where)
                            : type.type_class;
      type.edges.push_back(std::move(edge));
    }
    if (type.rate == 0.0) {
      result.warnings.push_back("dropping zero-rate online type \"" + type.id + "\"");
      continue;
    }
    online.push_back(std::move(type));
  }
  result.instance = Instance(std::move(offline), std::move(online));
  return result;
}

LoadResult LoadInstanceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open instance file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return LoadInstanceJson(buf.str());
}

std::string ToJson(const Instance& instance) {
  json doc;
  doc["offline"] = json::array();
  for (const auto& v : instance.offline()) doc["offline"].push_back({{"id", v.id}});
  doc["online"] = json::array();
  for (const auto& type : instance.online()) {
    json t;
    t["id"] = type.id;
    t["rate"] = type.rate;
    t["class"] = std::string(ToString(type.type_class));
    t["edges"] = json::array();
    for (const auto& e : type.edges) {
      t["edges"].push_back({{"to", e.to},
                            {"weight", e.weight},
                            {"x", e.x},
                            {"edge_class", std::string(ToString(e.edge_class))}});
    }
    doc["online"].push_back(std::move(t));
  }
  return doc.dump(2);
}

Instance MakeHardInstance(double k) {
  if (!(k >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "hard instance needs k >= 1, got " + Fmt(k));
  }
  std::vector<OfflineVertex> offline = {{"u", 0.0}, {"v", 0.0}};
  std::vector<OnlineType> online;
  online.push_back({"s_uv", 2.0 * kLn2, EdgeClass::kSecond,
                    {{"u", kUnresolved, 1.0, kLn2, EdgeClass::kSecond},
                     {"v", kUnresolved, 1.0, kLn2, EdgeClass::kSecond}}});
  online.push_back({"f_u", kFirstClassBudget, EdgeClass::kFirst,
                    {{"u", kUnresolved, k, kFirstClassBudget, EdgeClass::kFirst}}});
  online.push_back({"f_v", kFirstClassBudget, EdgeClass::kFirst,
                    {{"v", kUnresolved, k, kFirstClassBudget, EdgeClass::kFirst}}});
  return Instance(std::move(offline), std::move(online));
}

Instance MakeSubInstance(double k) {
  if (!(k >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sub-instance needs k >= 1, got " + Fmt(k));
  }
  std::vector<OfflineVertex> offline = {{"u", 0.0}};
  std::vector<OnlineType> online;
  online.push_back({"s_uv", 2.0 * kLn2, EdgeClass::kSecond,
                    {{"u", kUnresolved, 1.0, kLn2, EdgeClass::kSecond}}});
  online.push_back({"f_u", kFirstClassBudget, EdgeClass::kFirst,
                    {{"u", kUnresolved, k, kFirstClassBudget, EdgeClass::kFirst}}});
  return Instance(std::move(offline), std::move(online));
}

Instance MakeTriangleInstance() {
  constexpr double kB = 0.1;
  constexpr double kSide = 0.45;
  constexpr double kRest = kLn2 - kSide;
  auto first = [](const char* id, const char* to, double rate, double w) {
    return OnlineType{id, rate, EdgeClass::kFirst, {{to, kUnresolved, w, rate, EdgeClass::kFirst}}};
  };
  auto second = [](const char* id, const char* a, const char* b, double x, double wa,
                   double wb) {
    return OnlineType{id,
                      2.0 * x,
                      EdgeClass::kSecond,
                      {{a, kUnresolved, wa, x, EdgeClass::kSecond},
                       {b, kUnresolved, wb, x, EdgeClass::kSecond}}};
  };
  std::vector<OfflineVertex> offline = {{"A", 0.0}, {"B", 0.0}, {"C", 0.0}};
  std::vector<OnlineType> online = {
      first("f_A", "A", kFirstClassBudget, 2.0),
      first("f_B", "B", kB, 1.5),
      first("f_C", "C", kFirstClassBudget, 3.0),
      second("s_AB", "A", "B", kSide, 1.0, 1.25),
      second("s_BC", "B", "C", kSide, 0.75, 1.0),
      second("s_CA", "C", "A", kRest, 1.0, 0.5),
  };
  return Instance(std::move(offline), std::move(online));
}

Instance DisjointCopies(const Instance& instance, std::size_t copies) {
  std::vector<OfflineVertex> offline;
  std::vector<OnlineType> online;
  for (std::size_t c = 0; c < copies; ++c) {
    const std::string suffix = "." + std::to_string(c);
    for (OfflineVertex v : instance.offline()) {
      v.id += suffix;
      offline.push_back(std::move(v));
    }
    for (OnlineType t : instance.online()) {
      t.id += suffix;
      for (Edge& e : t.edges) e.to += suffix;
      online.push_back(std::move(t));
    }
  }
  return Instance(std::move(offline), std::move(online));
}

double HardLpValue(double k) { return 2.0 * kLn2 + (2.0 - 2.0 * kLn2) * k; }

double LpValue(const Instance& instance) {
  double total = 0.0;
  for (const auto& type : instance.online()) {
    for (const auto& e : type.edges) total += e.weight * e.x;
  }
  return total;
}

double NeighborArrivalRate(const Instance& instance, std::size_t j) {
  double rate = 0.0;
  for (const auto& type : instance.online()) {
    for (const auto& e : type.edges) {
      if (e.offline == j) {
        rate += type.rate;
        break;
      }
    }
  }
  return rate;
}

IncidentMass IncidentLpMass(const Instance& instance, std::size_t j) {
  IncidentMass m;
  for (const auto& type : instance.online()) {
    for (const auto& e : type.edges) {
      if (e.offline != j) continue;
      (e.edge_class == EdgeClass::kFirst ? m.first : m.second) += e.x;
    }
  }
  return m;
}

Instance Reclassify(const Instance& instance) {
  RequireValid(instance);
  std::vector<OfflineVertex> offline = instance.offline();
  std::vector<OnlineType> online = instance.online();

  std::vector<std::size_t> order(offline.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return offline[a].id < offline[b].id;
  });

  // Below this a deficit is rounding noise, not missing mass.
  constexpr double kSlack = 1e-12;

  for (std::size_t j : order) {
    const std::string& jid = offline[j].id;
    double y = 0.0;
    for (const auto& type : online) {
      for (const auto& e : type.edges) {
        if (e.to == jid && e.edge_class == EdgeClass::kFirst) y += e.x;
      }
    }
    double deficit = kFirstClassBudget - y;
    if (deficit < -kTolerance) {
      throw Error(ErrorCode::kValidation,
                  "offline vertex \"" + jid + "\" has y_j = " + Fmt(y) + " > 1 - ln 2");
    }
    if (deficit <= kSlack) continue;

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < online.size(); ++i) {
      for (std::size_t k = 0; k < online[i].edges.size(); ++k) {
        const auto& e = online[i].edges[k];
        if (e.to == jid && e.edge_class == EdgeClass::kSecond) candidates.emplace_back(i, k);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
      return online[a.first].id < online[b.first].id;
    });

    for (std::size_t c = 0; c < candidates.size() && deficit > kSlack; ++c) {
      auto [i, k] = candidates[c];
      Edge& edge = online[i].edges[k];
      if (edge.x <= deficit + kSlack) {
        edge.edge_class = EdgeClass::kFirst;
        deficit -= edge.x;
        continue;
      }
      // Split i into a part carrying exactly `deficit` on this edge and the rest.
      const double delta = deficit;
      OnlineType head = online[i];
      OnlineType tail = online[i];
      head.id += "#1";
      head.rate = 2.0 * delta;
      for (auto& e : head.edges) e.x = delta;
      head.edges[k].edge_class = EdgeClass::kFirst;
      tail.id += "#2";
      tail.rate = online[i].rate - 2.0 * delta;
      for (auto& e : tail.edges) e.x -= delta;
      online[i] = std::move(head);
      online.insert(online.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(tail));
      deficit = 0.0;
    }
    if (deficit > kTolerance) {
      throw Error(ErrorCode::kValidation,
                  "offline vertex \"" + jid + "\" lacks second-class mass to reclassify");
    }
  }
  return Instance(std::move(offline), std::move(online));
}

}  // namespace stochmatch
