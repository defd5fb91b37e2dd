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

/* C interface to the stochmatch library. Every handle is opaque and owned by
 * the caller; strings returned through char** are released with
 * sm_string_free. On failure a function returns a nonzero sm_status and
 * sm_last_error() describes it (per thread, valid until the next call). */

#ifndef STOCHMATCH_STOCHMATCH_H_
#define STOCHMATCH_STOCHMATCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SM_API __declspec(dllexport)
#else
#define SM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
  SM_OK = 0,
  SM_ERR_INVALID_ARGUMENT = 1,
  SM_ERR_IO = 2,
  SM_ERR_PARSE = 3,
  SM_ERR_VALIDATION = 4,
  SM_ERR_NUMERIC = 5,
  SM_ERR_INTERNAL = 6
} sm_status;

typedef struct sm_instance sm_instance;
typedef struct sm_estimate sm_estimate;
typedef struct sm_report sm_report;

SM_API const char* sm_version(void);
SM_API const char* sm_last_error(void);
SM_API const char* sm_status_name(sm_status status);
SM_API void sm_string_free(char* s);

/* Instances. `warnings` may be NULL; otherwise it receives one warning per
 * line (possibly empty). */
SM_API sm_status sm_instance_load_file(const char* path, sm_instance** out, char** warnings);
SM_API sm_status sm_instance_load_json(const char* json, sm_instance** out, char** warnings);
SM_API sm_status sm_instance_make_hard(double k, sm_instance** out);
SM_API sm_status sm_instance_make_triangle(sm_instance** out);
SM_API void sm_instance_free(sm_instance* instance);
SM_API sm_status sm_instance_to_json(const sm_instance* instance, char** out);
/* CSV with columns constraint,id,measured,bound,message; `count` receives the
 * number of violations. Either output may be NULL. */
SM_API sm_status sm_instance_validate(const sm_instance* instance, char** report,
                                      size_t* count);
SM_API sm_status sm_instance_reclassify(const sm_instance* instance, sm_instance** out);
SM_API sm_status sm_instance_lp_value(const sm_instance* instance, double* out);
SM_API sm_status sm_instance_counts(const sm_instance* instance, size_t* offline,
                                    size_t* online, size_t* edges);

/* Closed-form curves of the threshold policy (k, t0, t1) on G(k). */
typedef struct sm_curve_point {
  double t;
  double f_one;
  double g_both;
  double f_single;
  double g_prime;
  double g_bar;
  double p_first;
} sm_curve_point;

SM_API sm_status sm_eval_curves(double k, double t0, double t1, double t, sm_curve_point* out);
/* CSV t,f_one,g_both,f_single,g_prime,g_bar,p_first on a grid of `step`. */
SM_API sm_status sm_curves_csv(double k, double t0, double t1, double step, char** out);
SM_API sm_status sm_alg_objective(double k, double t0, double t1, double* out);

typedef struct sm_hardness {
  double k;
  double t0;
  double t1;
  double ratio;
} sm_hardness;

typedef struct sm_restricted {
  double t0;
  double gamma;
  double residual;
} sm_restricted;

/* tol <= 0 selects the default. threads == 0 uses every core. */
SM_API sm_status sm_optimize_hard(double tol, unsigned threads, sm_hardness* out);
SM_API sm_status sm_optimize_restricted(double tol, sm_restricted* out);

/* Grid estimates of pairwise both-unmatched probabilities. */
typedef struct sm_estimate_options {
  double t0;
  double grid_step;
  uint64_t ensemble_size;
  uint64_t seed;
  unsigned threads;
  int all_pairs;
} sm_estimate_options;

SM_API void sm_estimate_options_init(sm_estimate_options* options);
/* `instance` must be reclassified. */
SM_API sm_status sm_estimate_run(const sm_instance* instance, const sm_estimate_options* options,
                                 sm_estimate** out);
SM_API sm_status sm_estimate_from_csv(const char* csv, const sm_instance* instance, double t0,
                                      sm_estimate** out);
SM_API sm_status sm_estimate_to_csv(const sm_estimate* estimate, char** out);
SM_API sm_status sm_estimate_warnings(const sm_estimate* estimate, char** out);
SM_API void sm_estimate_free(sm_estimate* estimate);

/* Simulation. */
typedef enum sm_algorithm {
  SM_ALG_OPTIMAL_G = 0,
  SM_ALG_RESTRICTED = 1,
  SM_ALG_GENERALIZED = 2,
  SM_ALG_AUXILIARY = 3,
  SM_ALG_SUGGESTED = 4
} sm_algorithm;

SM_API sm_status sm_algorithm_parse(const char* name, sm_algorithm* out);

typedef struct sm_simulate_options {
  sm_algorithm algorithm;
  double k; /* optimal-g only */
  double t0;
  double t1; /* optimal-g only */
  uint64_t trials;
  uint64_t seed;
  double grid_step;
  unsigned threads;
  int all_pairs;
} sm_simulate_options;

SM_API void sm_simulate_options_init(sm_simulate_options* options);
/* `estimate` is required by the generalized and auxiliary algorithms and
 * ignored otherwise. */
SM_API sm_status sm_simulate(const sm_instance* instance, const sm_simulate_options* options,
                             const sm_estimate* estimate, sm_report** out);

typedef struct sm_report_summary {
  uint64_t trials;
  uint64_t seed;
  double mean_objective;
  double objective_se;
  uint64_t arrivals;
  uint64_t second_class_decisions;
  uint64_t clamps;
  uint64_t excess_clamps;
  uint64_t floors;
  uint64_t partition_violations;
  uint64_t rematch_attempts;
} sm_report_summary;

SM_API sm_status sm_report_summary_get(const sm_report* report, sm_report_summary* out);
SM_API sm_status sm_report_to_csv(const sm_report* report, char** out);
SM_API void sm_report_free(sm_report* report);

/* Runs the reproduction checks. `table` receives CSV rows
 * criterion,check,expected,computed,tolerance,verdict and `all_passed` is set
 * to 1 iff every check passed. `progress`, when not NULL, is called with one
 * summary line per finished criterion. */
typedef void (*sm_progress_fn)(const char* line, void* user);
SM_API sm_status sm_reproduce(unsigned threads, uint64_t seed, sm_progress_fn progress,
                              void* user, char** table, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* STOCHMATCH_STOCHMATCH_H_ */
