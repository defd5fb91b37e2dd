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

#include "acceptance.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <utility>

#include "stochmatch/analytics.h"
#include "stochmatch/estimator.h"
#include "stochmatch/instance.h"
#include "stochmatch/optimizer.h"
#include "stochmatch/rng.h"
#include "stochmatch/simulator.h"

namespace stochmatch {
namespace {

// Reference values and tolerances.
constexpr double kHardRatio = 0.66275;
constexpr double kHardK = 3.40216;
constexpr double kHardT0 = 0.12437;
constexpr double kHardT1 = 0.29539;
constexpr double kRatioTol = 5e-5;
constexpr double kCoordTol = 1e-3;
constexpr double kRestrictedT0 = 0.14753;
constexpr double kRestrictedT0Tol = 1e-4;
constexpr double kGamma = 0.66217;
constexpr double kGammaTol = 5e-5;
constexpr double kOdeTol = 1e-8;
constexpr double kContinuityTol = 1e-10;
constexpr int kRandomParams = 20;
constexpr int kCurvePoints = 1000;
constexpr double kZ = 3.0;
constexpr double kRelativeTol = 3e-3;
constexpr double kEdgeRateFloor = 5e-3;
constexpr double kPartitionSlack = 1e-12;
constexpr double kClampFrequency = 1e-2;
constexpr double kBracketLo = 0.662;
constexpr double kBracketHi = 0.663;

constexpr std::uint64_t kSimTrials = 1000000;
constexpr std::uint64_t kEnsemble = 100000;
// The invariant checks compare against the exact-estimate limit, so their
// estimate noise has to sit well below the simulation SE.
constexpr std::uint64_t kInvariantEnsemble = 1000000;
constexpr double kGridStep = 1e-2;

constexpr double kBudget1 = 60.0;
constexpr double kBudget2 = 5.0;
constexpr double kBudget3 = 30.0;
constexpr double kBudget4 = 120.0;
constexpr double kBudget5 = 600.0;

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string PlusMinus(double v, double tol) { return Num(v) + " +- " + Num(tol); }

CheckRow Within(std::string name, double expected, double computed, double tol) {
  CheckRow row;
  row.check = std::move(name);
  row.expected = PlusMinus(expected, tol);
  row.computed = computed;
  row.tolerance = Num(tol);
  row.pass = std::abs(computed - expected) <= tol;
  return row;
}

CheckRow AtMost(std::string name, double computed, double bound, std::string expected = "") {
  CheckRow row;
  row.check = std::move(name);
  row.expected = expected.empty() ? "<= " + Num(bound) : std::move(expected);
  row.computed = computed;
  row.tolerance = Num(bound);
  row.pass = computed <= bound;
  return row;
}

CheckRow Runtime(double seconds, double budget) {
  return AtMost("runtime seconds", seconds, budget);
}

CheckRow Info(std::string name, double computed) {
  CheckRow row;
  row.check = std::move(name);
  row.expected = "-";
  row.computed = computed;
  row.tolerance = "-";
  row.informational = true;
  return row;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double ProportionSe(double p, std::uint64_t n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

// Largest standardized excess of `value` over `bound`, (value - bound) / se,
// with a zero se treated as exact.
double ExcessZ(double value, double bound, double se) {
  const double d = value - bound;
  if (se > 0.0) return d / se;
  return d > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
}

struct PipelineRun {
  std::string label;
  Instance instance;  // reclassified
  std::shared_ptr<const GridEstimate> estimate;
  SimReport generalized;
  SimReport auxiliary;
};

struct Shared {
  std::optional<HardnessOptimum> hard;
  std::optional<RestrictedOptimum> restricted;
  std::optional<SimReport> threshold;
  std::vector<PipelineRun> pipelines;
  std::string pipeline_error;
  std::vector<PipelineRun> invariant_runs;
};

void Criterion1(Shared& s, CriterionResult& r, const AcceptanceOptions&) {
  OptimizerOptions opt;
  opt.threads = 1;
  const auto start = std::chrono::steady_clock::now();
  s.hard = OptimizeHardness(opt);
  const double secs = Seconds(start);
  r.rows.push_back(Within("hardness ratio", kHardRatio, s.hard->ratio, kRatioTol));
  r.rows.push_back(Within("k", kHardK, s.hard->k, kCoordTol));
  r.rows.push_back(Within("t0", kHardT0, s.hard->t0, kCoordTol));
  r.rows.push_back(Within("t1", kHardT1, s.hard->t1, kCoordTol));
  r.rows.push_back(Runtime(secs, kBudget1));
}

void Criterion2(Shared& s, CriterionResult& r, const AcceptanceOptions&) {
  const auto start = std::chrono::steady_clock::now();
  s.restricted = SolveRestricted();
  const double secs = Seconds(start);
  r.rows.push_back(Within("t0", kRestrictedT0, s.restricted->t0, kRestrictedT0Tol));
  r.rows.push_back(Within("gamma", kGamma, s.restricted->gamma, kGammaTol));
  r.rows.push_back(Runtime(secs, kBudget2));
}

void Criterion3(Shared&, CriterionResult& r, const AcceptanceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> kdist(1.0, 20.0);
  double worst = 0.0;
  double worst_jump = 0.0;
  for (int i = 0; i < kRandomParams; ++i) {
    double a = unit(rng);
    double b = unit(rng);
    if (a > b) std::swap(a, b);
    const HardParams params{kdist(rng), a, b};
    const std::vector<CurvePoint> ode = OdeOracle(params, 1e-4);
    // Uniform nodes are i / 10000; every tenth one lands on the 1000-point grid.
    for (const CurvePoint& node : ode) {
      const double scaled = node.t * kCurvePoints;
      if (std::abs(scaled - std::round(scaled)) > 1e-9 || node.t == 0.0) continue;
      const CurvePoint c = EvalCurves(params, node.t);
      worst = std::max({worst, std::abs(c.f_one - node.f_one), std::abs(c.g_both - node.g_both),
                        std::abs(c.p_first - node.p_first)});
    }
    for (double edge : {params.t0, params.t1}) {
      if (edge <= 0.0 || edge >= 1.0) continue;
      const CurvePoint at = EvalCurves(params, edge);
      const CurvePoint after = EvalCurves(params, std::nextafter(edge, 2.0));
      worst_jump = std::max({worst_jump, std::abs(at.f_one - after.f_one),
                             std::abs(at.g_both - after.g_both),
                             std::abs(at.p_first - after.p_first)});
    }
  }
  const double secs = Seconds(start);
  r.rows.push_back(AtMost("max |closed form - ODE| over 20 x 1000 points", worst, kOdeTol));
  r.rows.push_back(AtMost("max jump across t0, t1", worst_jump, kContinuityTol));
  r.rows.push_back(Runtime(secs, kBudget3));
}

void Criterion4(Shared& s, CriterionResult& r, const AcceptanceOptions& options) {
  const HardParams params{kHardK, kHardT0, kHardT1};
  const Instance g = MakeHardInstance(params.k);
  const auto start = std::chrono::steady_clock::now();
  const ThresholdPolicy policy(g, params);
  RunOptions run;
  run.trials = kSimTrials;
  run.seed = options.seed + 4;
  run.threads = options.threads;
  run.grid_step = kGridStep;
  s.threshold = Run(g, policy, run);
  const double secs = Seconds(start);
  const SimReport& rep = *s.threshold;

  const double exact = AlgObjective(params);
  CheckRow mean = Within("mean objective (3 SE)", exact, rep.mean_objective, kZ * rep.objective_se);
  r.rows.push_back(mean);
  r.rows.push_back(AtMost("mean objective relative error", std::abs(rep.mean_objective / exact - 1.0),
                          kRelativeTol));
  const CurvePoint c = EvalCurves(params, 1.0);
  const PairCurve& pair = rep.pairs.front();
  const double g_both = pair.both_matched.back();
  const double f_one = 1.0 - pair.both_unmatched.back() - g_both;
  r.rows.push_back(Within("g_both(1)", c.g_both, g_both, kZ * ProportionSe(g_both, rep.trials)));
  r.rows.push_back(Within("f_one(1)", c.f_one, f_one, kZ * ProportionSe(f_one, rep.trials)));
  r.rows.push_back(Runtime(secs, kBudget4));
}

std::vector<PipelineRun> RunPipelines(const Shared& s, const AcceptanceOptions& options,
                                      std::uint64_t ensemble, std::uint64_t salt,
                                      bool auxiliary) {
  const double t0 = s.restricted ? s.restricted->t0 : SolveRestricted().t0;
  const std::vector<std::pair<std::string, Instance>> inputs = {
      {"G", MakeHardInstance(kHardK)},
      {"2G", DisjointCopies(MakeHardInstance(kHardK), 2)},
      {"triangle", MakeTriangleInstance()},
  };
  std::vector<PipelineRun> out;
  for (const auto& [label, raw] : inputs) {
    PipelineRun p;
    p.label = label;
    RequireValid(raw);
    p.instance = Reclassify(raw);
    EstimateOptions est;
    est.t0 = t0;
    est.grid_step = kGridStep;
    est.ensemble_size = ensemble;
    est.seed = options.seed + salt++;
    est.threads = options.threads;
    p.estimate = std::make_shared<const GridEstimate>(Estimate(p.instance, est));
    RunOptions run;
    run.trials = kSimTrials;
    run.seed = options.seed + salt++;
    run.threads = options.threads;
    run.grid_step = kGridStep;
    p.generalized = Run(p.instance, GeneralizedPolicy(p.instance, t0, p.estimate), run);
    run.seed = options.seed + salt++;
    if (auxiliary) {
      p.auxiliary = Run(p.instance,
                        GeneralizedPolicy(p.instance, t0, p.estimate,
                                          GeneralizedPolicy::Mode::kAuxiliary),
                        run);
    }
    out.push_back(std::move(p));
  }
  return out;
}

void Criterion5(Shared& s, CriterionResult& r, const AcceptanceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  try {
    s.pipelines = RunPipelines(s, options, kEnsemble, 50, true);
  } catch (const std::exception& e) {
    s.pipeline_error = e.what();
    throw;
  }
  const double secs = Seconds(start);
  const double gamma = s.restricted ? s.restricted->gamma : SolveRestricted().gamma;
  for (const PipelineRun& p : s.pipelines) {
    for (const EdgeStat& e : p.generalized.edges) {
      const double tol = std::max(kZ * e.se / e.x, kEdgeRateFloor);
      r.rows.push_back(Within(p.label + " " + e.type + "-" + e.offline + " frequency / x", gamma,
                              e.frequency / e.x, tol));
    }
  }
  r.rows.push_back(Runtime(secs, kBudget5));
}

void Criterion6(Shared& s, CriterionResult& r, const AcceptanceOptions&) {
  if (!s.threshold || s.pipelines.empty()) {
    throw std::runtime_error("simulations of criteria 4 and 5 are unavailable" +
                             (s.pipeline_error.empty() ? "" : ": " + s.pipeline_error));
  }
  std::uint64_t violations = s.threshold->partition_violations;
  std::uint64_t rematches = s.threshold->rematch_attempts;
  DecisionStats aux;
  for (const PipelineRun& p : s.pipelines) {
    violations += p.generalized.partition_violations + p.auxiliary.partition_violations;
    rematches += p.generalized.rematch_attempts + p.auxiliary.rematch_attempts;
    aux += p.auxiliary.decisions;
    aux += p.estimate->stats;
  }
  const double decisions = std::max<double>(1.0, static_cast<double>(aux.second_class_decisions));
  r.rows.push_back(AtMost("arrivals with sum p > 1 + 1e-12", static_cast<double>(violations), 0.0,
                          "0"));
  r.rows.push_back(AtMost("realized edges at a matched vertex", static_cast<double>(rematches), 0.0,
                          "0"));
  r.rows.push_back(AtMost("auxiliary clamps beyond 3 SE / second-class decisions",
                          static_cast<double>(aux.excess_clamps) / decisions, kClampFrequency));
  r.rows.push_back(Info("auxiliary clamps of any size / second-class decisions",
                        static_cast<double>(aux.clamps) / decisions));
}

void Criterion7(Shared& s, CriterionResult& r, const AcceptanceOptions& options) {
  s.invariant_runs = RunPipelines(s, options, kInvariantEnsemble, 70, false);
  for (const PipelineRun& p : s.invariant_runs) {
    const SimReport& rep = p.generalized;
    const double t0 = p.estimate->t0;
    double z_f = 0.0;
    double z_g = -std::numeric_limits<double>::infinity();
    double z_gbar = -std::numeric_limits<double>::infinity();
    double est_slack = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < rep.grid.size(); ++b) {
      const double tau = rep.grid[b];
      const ReferenceCurves ref = RestrictedReference(t0, tau);
      const double f_single = 1.0 - ref.f_single_bar;
      const double g_both = EvalCurves({1.0, t0, t0}, tau).g_both;
      for (const VertexCurve& v : rep.vertices) {
        z_f = std::max(z_f, std::abs(ExcessZ(v.matched[b], f_single, v.se[b])));
      }
      for (const PairCurve& pc : rep.pairs) {
        z_g = std::max(z_g, ExcessZ(pc.both_matched[b], g_both, pc.both_matched_se[b]));
        // Empirical 2 f̄_u - g'_{u,v} is the probability that u or v is free.
        const double g_bar_uv = 1.0 - pc.both_matched[b];
        z_gbar = std::max(z_gbar, ExcessZ(ref.g_bar, g_bar_uv, pc.both_matched_se[b]));
      }
      const double noise = kZ * std::sqrt(0.25 / static_cast<double>(p.estimate->ensemble_size));
      for (const PairEstimate& pe : p.estimate->pairs) {
        est_slack = std::min(est_slack, pe.g_bar_uv[b] - (ref.g_bar - noise));
      }
    }
    r.rows.push_back(AtMost(p.label + " max |f_u - f_single| / SE", z_f, kZ));
    r.rows.push_back(AtMost(p.label + " max (g_uv - g_both) / SE", z_g, kZ));
    r.rows.push_back(AtMost(p.label + " max (g_bar - g_bar_uv) / SE", z_gbar, kZ));
    CheckRow est;
    est.check = p.label + " min estimated g_bar_uv - (g_bar - 3 sqrt(0.25 / N))";
    est.expected = ">= 0";
    est.computed = est_slack;
    est.tolerance = "0";
    est.pass = est_slack >= 0.0;
    r.rows.push_back(est);
  }
}

void Criterion8(Shared& s, CriterionResult& r, const AcceptanceOptions&) {
  const double hard = s.hard ? s.hard->ratio : OptimizeHardness().ratio;
  const double gamma = s.restricted ? s.restricted->gamma : SolveRestricted().gamma;
  CheckRow order;
  order.check = "hardness ratio - gamma";
  order.expected = "> 0";
  order.computed = hard - gamma;
  order.tolerance = "0";
  order.pass = hard > gamma;
  r.rows.push_back(order);
  for (const auto& [name, value] : {std::pair{"hardness ratio", hard}, std::pair{"gamma", gamma}}) {
    CheckRow in;
    in.check = std::string(name) + " in (0.662, 0.663)";
    in.expected = "(" + Num(kBracketLo) + ", " + Num(kBracketHi) + ")";
    in.computed = value;
    in.tolerance = "-";
    in.pass = value > kBracketLo && value < kBracketHi;
    r.rows.push_back(in);
  }
}

}  // namespace

bool CriterionResult::pass() const {
  if (rows.empty()) return false;
  return std::all_of(rows.begin(), rows.end(),
                     [](const CheckRow& row) { return row.pass || row.informational; });
}

std::vector<CriterionResult> RunAcceptance(const AcceptanceOptions& options) {
  using Step = void (*)(Shared&, CriterionResult&, const AcceptanceOptions&);
  const std::vector<std::pair<const char*, Step>> steps = {
      {"hardness optimum", Criterion1},
      {"restricted threshold and gamma", Criterion2},
      {"closed forms against the ODE", Criterion3},
      {"threshold policy simulation on G", Criterion4},
      {"generalized algorithm edge rates", Criterion5},
      {"probability partition and clamps", Criterion6},
      {"curve invariants on the grid", Criterion7},
      {"ordering of the two ratios", Criterion8},
  };
  Shared shared;
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CriterionResult r;
    r.id = static_cast<int>(i + 1);
    r.title = steps[i].first;
    const auto start = std::chrono::steady_clock::now();
    try {
      steps[i].second(shared, r, options);
    } catch (const std::exception& e) {
      CheckRow row;
      row.check = std::string("error: ") + e.what();
      row.expected = "-";
      row.tolerance = "-";
      row.computed = std::nan("");
      row.pass = false;
      r.rows.push_back(row);
    }
    r.seconds = Seconds(start);
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string FormatAcceptanceTable(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  os << "criterion,check,expected,computed,tolerance,verdict\n";
  for (const CriterionResult& r : results) {
    for (const CheckRow& row : r.rows) {
      os << r.id << ',' << '"' << row.check << '"' << ',' << row.expected << ','
         << Num(row.computed) << ',' << row.tolerance << ','
         << (row.informational ? "info" : row.pass ? "pass" : "FAIL") << '\n';
    }
  }
  return os.str();
}

std::string FormatCriterionLine(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << r.id << ": " << (r.pass() ? "PASS" : "FAIL") << ' ' << r.title << " ("
     << std::fixed << std::setprecision(2) << r.seconds << " s)";
  return os.str();
}

}  // namespace stochmatch
