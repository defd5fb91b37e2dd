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

#include "stochmatch/stochmatch.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <utility>

#include "acceptance.h"
#include "stochmatch/analytics.h"
#include "stochmatch/error.h"
#include "stochmatch/estimator.h"
#include "stochmatch/instance.h"
#include "stochmatch/optimizer.h"
#include "stochmatch/simulator.h"

struct sm_instance {
  stochmatch::Instance value;
};

struct sm_estimate {
  std::shared_ptr<const stochmatch::GridEstimate> value;
};

struct sm_report {
  stochmatch::SimReport value;
};

namespace {

using stochmatch::Error;
using stochmatch::ErrorCode;

thread_local std::string last_error;

sm_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return SM_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo:
      return SM_ERR_IO;
    case ErrorCode::kParse:
      return SM_ERR_PARSE;
    case ErrorCode::kValidation:
      return SM_ERR_VALIDATION;
    case ErrorCode::kNumeric:
      return SM_ERR_NUMERIC;
    case ErrorCode::kInternal:
      return SM_ERR_INTERNAL;
  }
  return SM_ERR_INTERNAL;
}

sm_status Fail(sm_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `fn`, mapping exceptions to status codes.
template <typename Fn>
sm_status Guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return SM_OK;
  } catch (const Error& e) {
    return Fail(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SM_ERR_INTERNAL, e.what());
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

sm_status LoadWith(stochmatch::LoadResult (*load)(const std::string&), const char* arg,
                   sm_instance** out, char** warnings) {
  return Guard([&] {
    Require(arg != nullptr && out != nullptr, "null argument");
    stochmatch::LoadResult r = load(arg);
    auto handle = std::make_unique<sm_instance>(sm_instance{std::move(r.instance)});
    if (warnings != nullptr) *warnings = CopyString(JoinLines(r.warnings));
    *out = handle.release();
  });
}

stochmatch::LoadResult LoadFile(const std::string& path) {
  return stochmatch::LoadInstanceFile(path);
}
stochmatch::LoadResult LoadText(const std::string& text) {
  return stochmatch::LoadInstanceJson(text);
}

sm_curve_point ToPoint(const stochmatch::CurvePoint& c) {
  const stochmatch::DerivedCurves d = stochmatch::Derive(c);
  return {c.t, c.f_one, c.g_both, d.f_single, d.g_prime, d.g_bar, c.p_first};
}

}  // namespace

extern "C" {

const char* sm_version(void) { return "0.1.0"; }

const char* sm_last_error(void) { return last_error.c_str(); }

const char* sm_status_name(sm_status status) {
  switch (status) {
    case SM_OK:
      return "ok";
    case SM_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case SM_ERR_IO:
      return "io";
    case SM_ERR_PARSE:
      return "parse";
    case SM_ERR_VALIDATION:
      return "validation";
    case SM_ERR_NUMERIC:
      return "numeric";
    case SM_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

void sm_string_free(char* s) { std::free(s); }

sm_status sm_instance_load_file(const char* path, sm_instance** out, char** warnings) {
  return LoadWith(LoadFile, path, out, warnings);
}

sm_status sm_instance_load_json(const char* json, sm_instance** out, char** warnings) {
  return LoadWith(LoadText, json, out, warnings);
}

sm_status sm_instance_make_hard(double k, sm_instance** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new sm_instance{stochmatch::MakeHardInstance(k)};
  });
}

sm_status sm_instance_make_triangle(sm_instance** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = new sm_instance{stochmatch::MakeTriangleInstance()};
  });
}

void sm_instance_free(sm_instance* instance) { delete instance; }

sm_status sm_instance_to_json(const sm_instance* instance, char** out) {
  return Guard([&] {
    Require(instance != nullptr && out != nullptr, "null argument");
    *out = CopyString(stochmatch::ToJson(instance->value));
  });
}

sm_status sm_instance_validate(const sm_instance* instance, char** report, size_t* count) {
  return Guard([&] {
    Require(instance != nullptr, "null argument");
    const auto violations = stochmatch::Validate(instance->value);
    if (count != nullptr) *count = violations.size();
    if (report != nullptr) {
      std::ostringstream os;
      os.precision(10);
      os << "constraint,id,measured,bound,message\n";
      for (const auto& v : violations) {
        os << v.constraint << ',' << v.id << ',' << v.measured << ',' << v.bound << ",\""
           << v.message << "\"\n";
      }
      *report = CopyString(os.str());
    }
  });
}

sm_status sm_instance_reclassify(const sm_instance* instance, sm_instance** out) {
  return Guard([&] {
    Require(instance != nullptr && out != nullptr, "null argument");
    *out = new sm_instance{stochmatch::Reclassify(instance->value)};
  });
}

sm_status sm_instance_lp_value(const sm_instance* instance, double* out) {
  return Guard([&] {
    Require(instance != nullptr && out != nullptr, "null argument");
    *out = stochmatch::LpValue(instance->value);
  });
}

sm_status sm_instance_counts(const sm_instance* instance, size_t* offline, size_t* online,
                             size_t* edges) {
  return Guard([&] {
    Require(instance != nullptr, "null argument");
    if (offline != nullptr) *offline = instance->value.offline().size();
    if (online != nullptr) *online = instance->value.online().size();
    if (edges != nullptr) *edges = instance->value.edge_count();
  });
}

sm_status sm_eval_curves(double k, double t0, double t1, double t, sm_curve_point* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(t >= 0.0 && t <= 1.0, "t must lie in [0, 1]");
    *out = ToPoint(stochmatch::EvalCurves({k, t0, t1}, t));
  });
}

sm_status sm_curves_csv(double k, double t0, double t1, double step, char** out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    Require(step > 0.0 && step <= 1.0, "step must lie in (0, 1]");
    const stochmatch::HardParams params{k, t0, t1};
    params.Check();
    const auto n = static_cast<long>(std::ceil(1.0 / step - 1e-9));
    std::ostringstream os;
    os.precision(10);
    os << "t,f_one,g_both,f_single,g_prime,g_bar,p_first\n";
    for (long i = 0; i <= n; ++i) {
      const double t = std::min(1.0, static_cast<double>(i) / static_cast<double>(n));
      const sm_curve_point p = ToPoint(stochmatch::EvalCurves(params, t));
      os << p.t << ',' << p.f_one << ',' << p.g_both << ',' << p.f_single << ',' << p.g_prime
         << ',' << p.g_bar << ',' << p.p_first << '\n';
    }
    *out = CopyString(os.str());
  });
}

sm_status sm_alg_objective(double k, double t0, double t1, double* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = stochmatch::AlgObjective({k, t0, t1});
  });
}

sm_status sm_optimize_hard(double tol, unsigned threads, sm_hardness* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    stochmatch::OptimizerOptions options;
    if (tol > 0.0) options.tol = tol;
    options.threads = threads;
    const auto r = stochmatch::OptimizeHardness(options);
    *out = {r.k, r.t0, r.t1, r.ratio};
  });
}

sm_status sm_optimize_restricted(double tol, sm_restricted* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    const auto r = tol > 0.0 ? stochmatch::SolveRestricted(tol) : stochmatch::SolveRestricted();
    *out = {r.t0, r.gamma, r.residual};
  });
}

void sm_estimate_options_init(sm_estimate_options* options) {
  if (options == nullptr) return;
  const stochmatch::EstimateOptions d;
  *options = {d.t0, d.grid_step, d.ensemble_size, d.seed, d.threads, d.all_pairs ? 1 : 0};
}

sm_status sm_estimate_run(const sm_instance* instance, const sm_estimate_options* options,
                          sm_estimate** out) {
  return Guard([&] {
    Require(instance != nullptr && options != nullptr && out != nullptr, "null argument");
    stochmatch::EstimateOptions o;
    o.t0 = options->t0;
    o.grid_step = options->grid_step;
    o.ensemble_size = options->ensemble_size;
    o.seed = options->seed;
    o.threads = options->threads;
    o.all_pairs = options->all_pairs != 0;
    auto est = std::make_shared<const stochmatch::GridEstimate>(
        stochmatch::Estimate(instance->value, o));
    *out = new sm_estimate{std::move(est)};
  });
}

sm_status sm_estimate_from_csv(const char* csv, const sm_instance* instance, double t0,
                               sm_estimate** out) {
  return Guard([&] {
    Require(csv != nullptr && instance != nullptr && out != nullptr, "null argument");
    auto est = std::make_shared<const stochmatch::GridEstimate>(
        stochmatch::EstimateFromCsv(csv, instance->value, t0));
    *out = new sm_estimate{std::move(est)};
  });
}

sm_status sm_estimate_to_csv(const sm_estimate* estimate, char** out) {
  return Guard([&] {
    Require(estimate != nullptr && out != nullptr, "null argument");
    *out = CopyString(stochmatch::EstimateToCsv(*estimate->value));
  });
}

sm_status sm_estimate_warnings(const sm_estimate* estimate, char** out) {
  return Guard([&] {
    Require(estimate != nullptr && out != nullptr, "null argument");
    *out = CopyString(JoinLines(estimate->value->warnings));
  });
}

void sm_estimate_free(sm_estimate* estimate) { delete estimate; }

sm_status sm_algorithm_parse(const char* name, sm_algorithm* out) {
  return Guard([&] {
    Require(name != nullptr && out != nullptr, "null argument");
    const std::string s(name);
    if (s == "optimal-g") {
      *out = SM_ALG_OPTIMAL_G;
    } else if (s == "restricted") {
      *out = SM_ALG_RESTRICTED;
    } else if (s == "generalized") {
      *out = SM_ALG_GENERALIZED;
    } else if (s == "auxiliary") {
      *out = SM_ALG_AUXILIARY;
    } else if (s == "suggested") {
      *out = SM_ALG_SUGGESTED;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown algorithm \"" + s + "\"");
    }
  });
}

void sm_simulate_options_init(sm_simulate_options* options) {
  if (options == nullptr) return;
  const stochmatch::RunOptions d;
  *options = {SM_ALG_OPTIMAL_G, 1.0,      0.0,       0.0, d.trials, d.seed, d.grid_step,
              d.threads,        d.all_pairs ? 1 : 0};
}

sm_status sm_simulate(const sm_instance* instance, const sm_simulate_options* options,
                      const sm_estimate* estimate, sm_report** out) {
  return Guard([&] {
    Require(instance != nullptr && options != nullptr && out != nullptr, "null argument");
    const stochmatch::Instance& in = instance->value;
    stochmatch::RequireValid(in);
    std::unique_ptr<stochmatch::Policy> policy;
    switch (options->algorithm) {
      case SM_ALG_OPTIMAL_G:
        policy = std::make_unique<stochmatch::ThresholdPolicy>(
            in, stochmatch::HardParams{options->k, options->t0, options->t1});
        break;
      case SM_ALG_RESTRICTED:
        policy = std::make_unique<stochmatch::ThresholdPolicy>(
            stochmatch::ThresholdPolicy::Restricted(in, options->t0));
        break;
      case SM_ALG_GENERALIZED:
      case SM_ALG_AUXILIARY:
        Require(estimate != nullptr, "the generalized and auxiliary algorithms need an estimate");
        policy = std::make_unique<stochmatch::GeneralizedPolicy>(
            in, options->t0, estimate->value,
            options->algorithm == SM_ALG_GENERALIZED
                ? stochmatch::GeneralizedPolicy::Mode::kGeneralized
                : stochmatch::GeneralizedPolicy::Mode::kAuxiliary);
        break;
      case SM_ALG_SUGGESTED:
        policy = std::make_unique<stochmatch::SuggestedPolicy>(in);
        break;
      default:
        throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
    }
    stochmatch::RunOptions run;
    run.trials = options->trials;
    run.seed = options->seed;
    run.grid_step = options->grid_step;
    run.threads = options->threads;
    run.all_pairs = options->all_pairs != 0;
    *out = new sm_report{stochmatch::Run(in, *policy, run)};
  });
}

sm_status sm_report_summary_get(const sm_report* report, sm_report_summary* out) {
  return Guard([&] {
    Require(report != nullptr && out != nullptr, "null argument");
    const auto& r = report->value;
    *out = {r.trials,
            r.seed,
            r.mean_objective,
            r.objective_se,
            r.arrivals,
            r.decisions.second_class_decisions,
            r.decisions.clamps,
            r.decisions.excess_clamps,
            r.decisions.floors,
            r.partition_violations,
            r.rematch_attempts};
  });
}

sm_status sm_report_to_csv(const sm_report* report, char** out) {
  return Guard([&] {
    Require(report != nullptr && out != nullptr, "null argument");
    *out = CopyString(stochmatch::ReportToCsv(report->value));
  });
}

void sm_report_free(sm_report* report) { delete report; }

sm_status sm_reproduce(unsigned threads, uint64_t seed, sm_progress_fn progress, void* user,
                       char** table, int* all_passed) {
  return Guard([&] {
    Require(table != nullptr && all_passed != nullptr, "null argument");
    stochmatch::AcceptanceOptions options;
    options.threads = threads;
    options.seed = seed;
    if (progress != nullptr) {
      options.on_result = [&](const stochmatch::CriterionResult& r) {
        progress(stochmatch::FormatCriterionLine(r).c_str(), user);
      };
    }
    const auto results = stochmatch::RunAcceptance(options);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass();
    *table = CopyString(stochmatch::FormatAcceptanceTable(results));
    *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
