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
#include <string>

#include <gtest/gtest.h>

#include "stochmatch/error.h"
#include "stochmatch/instance.h"

namespace stochmatch {
namespace {

constexpr double kEps = 1e-12;

bool HasViolation(const Instance& in, const std::string& constraint) {
  const auto v = Validate(in);
  return std::any_of(v.begin(), v.end(),
                     [&](const Violation& x) { return x.constraint == constraint; });
}

Instance SingleFirstClass(double rate, double x) {
  return Instance({{"j", 0.0}},
                  {{"i", rate, EdgeClass::kFirst, {{"j", kUnresolved, 1.0, x, EdgeClass::kFirst}}}});
}

double Mass(const Instance& in, std::size_t j, EdgeClass c) {
  const IncidentMass m = IncidentLpMass(in, j);
  return c == EdgeClass::kFirst ? m.first : m.second;
}

TEST(HardInstance, ValidAndShaped) {
  for (double k : {1.0, 2.0, 3.40216, 20.0}) {
    const Instance g = MakeHardInstance(k);
    EXPECT_TRUE(Validate(g).empty()) << "k=" << k;
    EXPECT_NEAR(g.total_rate(), 2.0, kEps);
    ASSERT_EQ(g.offline().size(), 2u);
    ASSERT_EQ(g.online().size(), 3u);
    EXPECT_EQ(g.edge_count(), 4u);
  }
}

TEST(HardInstance, LpValue) {
  EXPECT_NEAR(LpValue(MakeHardInstance(1.0)), 2.0, kEps);
  EXPECT_NEAR(LpValue(MakeHardInstance(3.40216)), HardLpValue(3.40216), kEps);
  EXPECT_NEAR(HardLpValue(3.40216), 3.47422, 5e-6);
  EXPECT_NEAR(LpValue(Instance()), 0.0, 0.0);
}

TEST(HardInstance, RejectsSmallK) {
  EXPECT_THROW(MakeHardInstance(0.5), Error);
  EXPECT_THROW(MakeSubInstance(0.99), Error);
}

TEST(SubInstance, Shape) {
  const Instance s = MakeSubInstance(1.0);
  EXPECT_EQ(MakeSubInstance(5.0).offline().size(), 1u);
  EXPECT_NEAR(NeighborArrivalRate(s, 0), 1.0 + kLn2, kEps);
  double best = 0.0;
  for (const auto& t : MakeSubInstance(2.0).online()) {
    for (const auto& e : t.edges) best = std::max(best, e.weight);
  }
  EXPECT_DOUBLE_EQ(best, 2.0);
  // One live edge on a second-class type is not reduced form.
  EXPECT_TRUE(HasViolation(s, "edge_count"));
}

TEST(Validate, UnderfilledVertex) {
  const Instance in = SingleFirstClass(0.5, 0.5);
  const auto v = Validate(in);
  const auto it = std::find_if(v.begin(), v.end(),
                               [](const Violation& x) { return x.constraint == "offline_full"; });
  ASSERT_NE(it, v.end());
  EXPECT_EQ(it->id, "j");
  EXPECT_NEAR(it->measured, 0.5, kEps);
  EXPECT_NEAR(it->bound, 1.0, kEps);
}

TEST(Validate, ConcentrationBound) {
  const Instance in = SingleFirstClass(1.0, 1.0);
  const auto v = Validate(in);
  const auto it = std::find_if(v.begin(), v.end(), [](const Violation& x) {
    return x.constraint == "lp_concentration";
  });
  ASSERT_NE(it, v.end());
  EXPECT_NEAR(it->measured, 1.0, kEps);
  EXPECT_NEAR(it->bound, 1.0 - kLn2, kEps);
}

TEST(Validate, UnknownNeighborIsReportedNotThrown) {
  const Instance in({{"j", 0.0}},
                    {{"i", 1.0, EdgeClass::kFirst, {{"nope", kUnresolved, 1.0, 1.0, EdgeClass::kFirst}}}});
  EXPECT_TRUE(HasViolation(in, "unknown_offline"));
}

TEST(Validate, SecondClassFractions) {
  const Instance in(
      {{"a", 0.0}, {"b", 0.0}},
      {{"s", 1.0, EdgeClass::kSecond,
        {{"a", kUnresolved, 1.0, 0.7, EdgeClass::kSecond},
         {"b", kUnresolved, 1.0, 0.3, EdgeClass::kSecond}}}});
  EXPECT_TRUE(HasViolation(in, "type_fraction"));
}

TEST(Validate, SameNeighborTwice) {
  const Instance in(
      {{"a", 0.0}},
      {{"s", 1.0, EdgeClass::kSecond,
        {{"a", kUnresolved, 1.0, 0.5, EdgeClass::kSecond},
         {"a", kUnresolved, 1.0, 0.5, EdgeClass::kSecond}}}});
  EXPECT_TRUE(HasViolation(in, "distinct_neighbors"));
}

TEST(Validate, RequireValidThrows) {
  try {
    RequireValid(SingleFirstClass(0.5, 0.5));
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
  EXPECT_NO_THROW(RequireValid(MakeHardInstance(2.0)));
}

TEST(Triangle, NeedsReclassification) {
  const Instance t = MakeTriangleInstance();
  EXPECT_TRUE(Validate(t).empty());
  ASSERT_EQ(t.offline().size(), 3u);
  const std::size_t b = *t.FindOffline("B");
  EXPECT_NEAR(t.offline()[b].y, 0.1, 1e-12);
}

TEST(Reclassify, LeavesHardInstanceAlone) {
  const Instance g = MakeHardInstance(2.5);
  EXPECT_EQ(ToJson(Reclassify(g)), ToJson(g));
}

TEST(Reclassify, SplitsTriangle) {
  const Instance raw = MakeTriangleInstance();
  const Instance r = Reclassify(raw);
  EXPECT_TRUE(Validate(r).empty());
  for (std::size_t j = 0; j < r.offline().size(); ++j) {
    EXPECT_NEAR(Mass(r, j, EdgeClass::kFirst), 1.0 - kLn2, 1e-9);
    EXPECT_NEAR(Mass(r, j, EdgeClass::kSecond), kLn2, 1e-9);
  }
  EXPECT_NEAR(r.total_rate(), raw.total_rate(), 1e-12);
  EXPECT_NEAR(LpValue(r), LpValue(raw), 1e-12);
  ASSERT_TRUE(r.FindOnline("s_AB#1").has_value());
  ASSERT_TRUE(r.FindOnline("s_AB#2").has_value());
  EXPECT_FALSE(r.FindOnline("s_AB").has_value());
  const OnlineType& part = r.online()[*r.FindOnline("s_AB#1")];
  const double delta = 1.0 - kLn2 - 0.1;
  EXPECT_NEAR(part.rate, 2.0 * delta, 1e-12);
  for (const Edge& e : part.edges) {
    EXPECT_NEAR(e.x, delta, 1e-12);
    EXPECT_EQ(e.edge_class, e.to == "B" ? EdgeClass::kFirst : EdgeClass::kSecond);
  }
}

TEST(Reclassify, WholeEdgeWithoutSplit) {
  const double a = 1.0 - kLn2;
  // y_v = y_w = 0; v's deficit is exactly the x of s1's edge at v, w's
  // deficit exactly the x of s0's edge at w.
  const Instance in(
      {{"r", 0.0}, {"u", 0.0}, {"v", 0.0}, {"w", 0.0}},
      {{"f_r", a, EdgeClass::kFirst, {{"r", kUnresolved, 1.0, a, EdgeClass::kFirst}}},
       {"f_u", a, EdgeClass::kFirst, {{"u", kUnresolved, 1.0, a, EdgeClass::kFirst}}},
       {"s0", 2.0 * a, EdgeClass::kSecond,
        {{"w", kUnresolved, 1.0, a, EdgeClass::kSecond},
         {"r", kUnresolved, 1.0, a, EdgeClass::kSecond}}},
       {"s1", 2.0 * a, EdgeClass::kSecond,
        {{"u", kUnresolved, 1.0, a, EdgeClass::kSecond},
         {"v", kUnresolved, 1.0, a, EdgeClass::kSecond}}},
       {"s2", 2.0 * kLn2, EdgeClass::kSecond,
        {{"v", kUnresolved, 1.0, kLn2, EdgeClass::kSecond},
         {"w", kUnresolved, 1.0, kLn2, EdgeClass::kSecond}}},
       {"s3", 2.0 * (2.0 * kLn2 - 1.0), EdgeClass::kSecond,
        {{"u", kUnresolved, 1.0, 2.0 * kLn2 - 1.0, EdgeClass::kSecond},
         {"r", kUnresolved, 1.0, 2.0 * kLn2 - 1.0, EdgeClass::kSecond}}}});
  ASSERT_TRUE(Validate(in).empty());
  const Instance r = Reclassify(in);
  EXPECT_EQ(r.online().size(), in.online().size());
  for (const auto& t : r.online()) EXPECT_EQ(t.id.find('#'), std::string::npos);
  const OnlineType& s1 = r.online()[*r.FindOnline("s1")];
  EXPECT_EQ(s1.edges[1].edge_class, EdgeClass::kFirst);
  const OnlineType& s0 = r.online()[*r.FindOnline("s0")];
  EXPECT_EQ(s0.edges[0].edge_class, EdgeClass::kFirst);
  for (std::size_t j = 0; j < r.offline().size(); ++j) {
    EXPECT_NEAR(r.offline()[j].y, 1.0 - kLn2, 1e-9);
  }
}

TEST(Reclassify, Idempotent) {
  const Instance once = Reclassify(MakeTriangleInstance());
  EXPECT_EQ(ToJson(Reclassify(once)), ToJson(once));
}

TEST(Copies, DisjointAndValid) {
  const Instance two = DisjointCopies(MakeHardInstance(2.0), 2);
  EXPECT_TRUE(Validate(two).empty());
  EXPECT_EQ(two.offline().size(), 4u);
  EXPECT_TRUE(two.FindOffline("u.1").has_value());
  EXPECT_NEAR(LpValue(two), 2.0 * HardLpValue(2.0), 1e-12);
}

TEST(Json, RoundTrip) {
  const Instance r = Reclassify(MakeTriangleInstance());
  const LoadResult back = LoadInstanceJson(ToJson(r));
  EXPECT_TRUE(back.warnings.empty());
  EXPECT_EQ(ToJson(back.instance), ToJson(r));
}

TEST(Json, ZeroRateDroppedWithWarning) {
  const char* text = R"({"offline":[{"id":"u"}],
    "online":[{"id":"z","rate":0,"class":"first","edges":[{"to":"u","weight":1,"x":0}]},
              {"id":"f","rate":1,"class":"first","edges":[{"to":"u","weight":1,"x":1}]}]})";
  const LoadResult r = LoadInstanceJson(text);
  EXPECT_EQ(r.instance.online().size(), 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("z"), std::string::npos);
}

TEST(Json, Rejects) {
  auto code = [](const char* text) {
    try {
      LoadInstanceJson(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  EXPECT_EQ(code("{"), ErrorCode::kParse);
  EXPECT_EQ(code(R"({"offline":[]})"), ErrorCode::kParse);
  EXPECT_EQ(code(R"({"offline":[{"id":"u"},{"id":"u"}],"online":[]})"), ErrorCode::kParse);
  EXPECT_EQ(code(R"({"offline":[{"id":"u"}],"online":[{"id":"a","rate":1,"class":"third","edges":[]}]})"),
            ErrorCode::kParse);
  EXPECT_EQ(code("{\"offline\":[{\"id\":\"\xff\"}],\"online\":[]}"), ErrorCode::kParse);
}

TEST(Json, MissingFile) {
  try {
    LoadInstanceFile("/nonexistent/instance.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace stochmatch
