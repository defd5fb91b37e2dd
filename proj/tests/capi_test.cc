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
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "stochmatch/stochmatch.h"

namespace {

std::string Take(char* s) {
  std::string out = s ? s : "";
  sm_string_free(s);
  return out;
}

TEST(CApi, Version) {
  EXPECT_STREQ(sm_version(), "0.1.0");
  EXPECT_STREQ(sm_status_name(SM_OK), "ok");
}

TEST(CApi, HardInstance) {
  sm_instance* g = nullptr;
  ASSERT_EQ(sm_instance_make_hard(2.0, &g), SM_OK);
  double lp = 0.0;
  ASSERT_EQ(sm_instance_lp_value(g, &lp), SM_OK);
  EXPECT_NEAR(lp, 2.0 * 0.6931471805599453 + 2.0 * 2.0 * (1.0 - 0.6931471805599453), 1e-12);
  size_t off = 0, on = 0, edges = 0;
  ASSERT_EQ(sm_instance_counts(g, &off, &on, &edges), SM_OK);
  EXPECT_EQ(off, 2u);
  EXPECT_EQ(on, 3u);
  EXPECT_EQ(edges, 4u);
  size_t violations = 99;
  ASSERT_EQ(sm_instance_validate(g, nullptr, &violations), SM_OK);
  EXPECT_EQ(violations, 0u);
  sm_instance_free(g);
}

TEST(CApi, JsonRoundTripAndErrors) {
  sm_instance* t = nullptr;
  ASSERT_EQ(sm_instance_make_triangle(&t), SM_OK);
  char* json = nullptr;
  ASSERT_EQ(sm_instance_to_json(t, &json), SM_OK);
  sm_instance* back = nullptr;
  char* warnings = nullptr;
  ASSERT_EQ(sm_instance_load_json(json, &back, &warnings), SM_OK);
  EXPECT_EQ(Take(warnings), "");
  char* again = nullptr;
  ASSERT_EQ(sm_instance_to_json(back, &again), SM_OK);
  EXPECT_EQ(Take(json), Take(again));
  sm_instance_free(back);
  sm_instance_free(t);

  sm_instance* bad = nullptr;
  EXPECT_EQ(sm_instance_load_json("{", &bad, nullptr), SM_ERR_PARSE);
  EXPECT_EQ(bad, nullptr);
  EXPECT_NE(std::string(sm_last_error()), "");
  EXPECT_EQ(sm_instance_load_file("/nonexistent.json", &bad, nullptr), SM_ERR_IO);
  EXPECT_EQ(sm_instance_make_hard(0.5, &bad), SM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(sm_instance_make_hard(2.0, nullptr), SM_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Curves) {
  sm_curve_point p;
  ASSERT_EQ(sm_eval_curves(3.40216, 0.12437, 0.29539, 0.5, &p), SM_OK);
  EXPECT_NEAR(p.f_one + p.g_both + p.g_prime, 1.0, 1e-12);
  EXPECT_EQ(sm_eval_curves(3.0, 0.1, 0.2, 1.5, &p), SM_ERR_INVALID_ARGUMENT);
  char* csv = nullptr;
  ASSERT_EQ(sm_curves_csv(2.0, 0.1, 0.2, 0.5, &csv), SM_OK);
  EXPECT_EQ(Take(csv).rfind("t,f_one,g_both,f_single,g_prime,g_bar,p_first\n", 0), 0u);
  sm_restricted r;
  ASSERT_EQ(sm_optimize_restricted(1e-9, &r), SM_OK);
  EXPECT_NEAR(r.gamma, 0.66217, 5e-5);
}

TEST(CApi, EstimateAndSimulate) {
  sm_instance* raw = nullptr;
  sm_instance* t = nullptr;
  ASSERT_EQ(sm_instance_make_triangle(&raw), SM_OK);
  ASSERT_EQ(sm_instance_reclassify(raw, &t), SM_OK);

  sm_estimate_options eo;
  sm_estimate_options_init(&eo);
  eo.t0 = 0.14753;
  eo.ensemble_size = 10000;
  eo.seed = 3;
  sm_estimate* est = nullptr;
  ASSERT_EQ(sm_estimate_run(t, &eo, &est), SM_OK);
  EXPECT_EQ(sm_estimate_run(raw, &eo, &est), SM_ERR_INVALID_ARGUMENT);

  char* csv = nullptr;
  ASSERT_EQ(sm_estimate_to_csv(est, &csv), SM_OK);
  sm_estimate* back = nullptr;
  const std::string text = Take(csv);
  ASSERT_EQ(sm_estimate_from_csv(text.c_str(), t, 0.14753, &back), SM_OK);

  sm_simulate_options so;
  sm_simulate_options_init(&so);
  ASSERT_EQ(sm_algorithm_parse("auxiliary", &so.algorithm), SM_OK);
  EXPECT_EQ(sm_algorithm_parse("greedy", &so.algorithm), SM_ERR_INVALID_ARGUMENT);
  so.t0 = 0.14753;
  so.trials = 5000;
  so.seed = 4;
  sm_report* rep = nullptr;
  ASSERT_EQ(sm_simulate(t, &so, back, &rep), SM_OK);
  sm_report_summary s;
  ASSERT_EQ(sm_report_summary_get(rep, &s), SM_OK);
  EXPECT_EQ(s.trials, 5000u);
  EXPECT_EQ(s.rematch_attempts, 0u);
  EXPECT_GT(s.second_class_decisions, 0u);
  sm_report_free(rep);

  EXPECT_EQ(sm_simulate(t, &so, nullptr, &rep), SM_ERR_INVALID_ARGUMENT);

  sm_estimate_free(back);
  sm_estimate_free(est);
  sm_instance_free(t);
  sm_instance_free(raw);
}

TEST(CApi, NullHandlesAreSafe) {
  sm_instance_free(nullptr);
  sm_estimate_free(nullptr);
  sm_report_free(nullptr);
  sm_string_free(nullptr);
  double lp;
  EXPECT_EQ(sm_instance_lp_value(nullptr, &lp), SM_ERR_INVALID_ARGUMENT);
}

}  // namespace
