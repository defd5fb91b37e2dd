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

// stochmatch command-line front end. Talks to the library only through the C
// interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stochmatch/stochmatch.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// Carries the exit status out of a command.
struct Exit {
  int code;
  std::string message;
};

struct Global {
  std::uint64_t seed = 20260101;
  unsigned threads = 0;
  std::string out;
  bool quiet = false;
};

struct InstanceFlags {
  std::string path;
  std::optional<double> k;
};

struct Owned {
  void operator()(sm_instance* p) const { sm_instance_free(p); }
  void operator()(sm_estimate* p) const { sm_estimate_free(p); }
  void operator()(sm_report* p) const { sm_report_free(p); }
  void operator()(char* p) const { sm_string_free(p); }
};
using InstancePtr = std::unique_ptr<sm_instance, Owned>;
using EstimatePtr = std::unique_ptr<sm_estimate, Owned>;
using ReportPtr = std::unique_ptr<sm_report, Owned>;
using StringPtr = std::unique_ptr<char, Owned>;

int ExitFor(sm_status status) {
  switch (status) {
    case SM_OK:
      return kExitOk;
    case SM_ERR_INVALID_ARGUMENT:
    case SM_ERR_IO:
    case SM_ERR_PARSE:
    case SM_ERR_VALIDATION:
      return kExitUsage;
    default:
      return kExitCheckFailed;
  }
}

void Check(sm_status status) {
  if (status != SM_OK) {
    throw Exit{ExitFor(status),
               std::string(sm_status_name(status)) + " error: " + sm_last_error()};
  }
}

std::string Fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void Emit(const Global& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw Exit{kExitUsage, "cannot open output file " + g.out};
  f << text;
  if (!f) throw Exit{kExitUsage, "cannot write output file " + g.out};
}

void Log(const Global& g, const std::string& line) {
  if (!g.quiet) std::cerr << line << '\n';
}

// Echo of the resolved configuration, one key=value line.
class ConfigEcho {
 public:
  ConfigEcho(const Global& g, const std::string& command) {
    os_.precision(10);
    os_ << "config command=" << command << " seed=" << g.seed << " threads=" << g.threads
        << " out=" << (g.out.empty() ? "-" : g.out);
  }
  template <typename T>
  ConfigEcho& Add(const char* key, const T& value) {
    os_ << ' ' << key << '=' << value;
    return *this;
  }
  void Print(const Global& g) const { Log(g, os_.str()); }

 private:
  std::ostringstream os_;
};

InstancePtr LoadInstance(const Global& g, const InstanceFlags& flags) {
  sm_instance* raw = nullptr;
  if (!flags.path.empty()) {
    char* warnings = nullptr;
    Check(sm_instance_load_file(flags.path.c_str(), &raw, &warnings));
    StringPtr w(warnings);
    if (w && *w) {
      std::istringstream lines(w.get());
      for (std::string line; std::getline(lines, line);) Log(g, "warning: " + line);
    }
  } else {
    Check(sm_instance_make_hard(*flags.k, &raw));
  }
  return InstancePtr(raw);
}

void RequireValid(const sm_instance* instance) {
  char* report = nullptr;
  size_t count = 0;
  Check(sm_instance_validate(instance, &report, &count));
  StringPtr r(report);
  if (count > 0) {
    throw Exit{kExitUsage, "instance violates " + std::to_string(count) +
                               " constraint(s):\n" + std::string(r.get())};
  }
}

InstancePtr ReadyInstance(const Global& g, const InstanceFlags& flags) {
  InstancePtr raw = LoadInstance(g, flags);
  RequireValid(raw.get());
  sm_instance* reclassified = nullptr;
  Check(sm_instance_reclassify(raw.get(), &reclassified));
  return InstancePtr(reclassified);
}

double DefaultT0() {
  sm_restricted r{};
  Check(sm_optimize_restricted(0.0, &r));
  return r.t0;
}

std::string Describe(const InstanceFlags& f) {
  return f.path.empty() ? "G(k=" + Fmt(*f.k) + ")" : f.path;
}

void AddInstanceFlags(CLI::App* cmd, InstanceFlags& f) {
  auto* path = cmd->add_option("--instance", f.path, "Instance JSON file")->check(CLI::ExistingFile);
  auto* k = cmd->add_option("--k", f.k, "Use the hard instance G(k) instead of a file")
                ->check(CLI::PositiveNumber);
  path->excludes(k);
  k->excludes(path);
}

void RequireInstance(const InstanceFlags& f) {
  if (f.path.empty() && !f.k) throw Exit{kExitUsage, "one of --instance or --k is required"};
}

// --- commands ---------------------------------------------------------------

int Validate(const Global& g, const InstanceFlags& flags) {
  RequireInstance(flags);
  ConfigEcho(g, "validate").Add("instance", Describe(flags)).Print(g);
  InstancePtr in = LoadInstance(g, flags);
  char* report = nullptr;
  size_t count = 0;
  Check(sm_instance_validate(in.get(), &report, &count));
  StringPtr r(report);
  Emit(g, r.get());
  double lp = 0.0;
  Check(sm_instance_lp_value(in.get(), &lp));
  Log(g, "violations=" + std::to_string(count) + " lp_value=" + Fmt(lp));
  return count == 0 ? kExitOk : kExitCheckFailed;
}

struct CurvesFlags {
  double k = 3.40216;
  double t0 = 0.12437;
  double t1 = 0.29539;
  double step = 1e-3;
};

int Curves(const Global& g, const CurvesFlags& f) {
  ConfigEcho(g, "curves").Add("k", f.k).Add("t0", f.t0).Add("t1", f.t1).Add("step", f.step).Print(g);
  char* csv = nullptr;
  Check(sm_curves_csv(f.k, f.t0, f.t1, f.step, &csv));
  StringPtr c(csv);
  Emit(g, c.get());
  double alg = 0.0;
  Check(sm_alg_objective(f.k, f.t0, f.t1, &alg));
  Log(g, "alg_objective=" + Fmt(alg));
  return kExitOk;
}

struct OptimizeFlags {
  std::string mode = "hard";
  double tol = 0.0;
};

int Optimize(const Global& g, const OptimizeFlags& f) {
  ConfigEcho(g, "optimize").Add("mode", f.mode).Add("tol", f.tol > 0 ? Fmt(f.tol) : "default").Print(g);
  std::string line;
  std::string human;
  if (f.mode == "hard") {
    sm_hardness h{};
    Check(sm_optimize_hard(f.tol, g.threads, &h));
    line = "mode=hard ratio=" + Fmt(h.ratio) + " k=" + Fmt(h.k) + " t0=" + Fmt(h.t0) +
           " t1=" + Fmt(h.t1) + "\n";
    human = "hardest G(k) at k = " + Fmt(h.k) + ": best thresholds t0 = " + Fmt(h.t0) +
            ", t1 = " + Fmt(h.t1) + " reach ratio " + Fmt(h.ratio);
  } else {
    sm_restricted r{};
    Check(sm_optimize_restricted(f.tol, &r));
    line = "mode=restricted t0=" + Fmt(r.t0) + " gamma=" + Fmt(r.gamma) +
           " residual=" + Fmt(r.residual) + "\n";
    human = "restricted threshold t0 = " + Fmt(r.t0) + " balances both edge classes at " +
            Fmt(r.gamma);
  }
  Emit(g, line);
  Log(g, human);
  return kExitOk;
}

struct EstimateFlags {
  InstanceFlags instance;
  std::optional<double> t0;
  double grid = 1e-2;
  std::uint64_t ensemble = 100000;
  bool all_pairs = false;
};

EstimatePtr RunEstimate(const Global& g, const sm_instance* in, double t0, double grid,
                        std::uint64_t ensemble, bool all_pairs) {
  sm_estimate_options o;
  sm_estimate_options_init(&o);
  o.t0 = t0;
  o.grid_step = grid;
  o.ensemble_size = ensemble;
  o.seed = g.seed;
  o.threads = g.threads;
  o.all_pairs = all_pairs ? 1 : 0;
  sm_estimate* est = nullptr;
  Check(sm_estimate_run(in, &o, &est));
  EstimatePtr e(est);
  char* warnings = nullptr;
  Check(sm_estimate_warnings(e.get(), &warnings));
  StringPtr w(warnings);
  std::istringstream lines(w.get());
  for (std::string l; std::getline(lines, l);) Log(g, "warning: " + l);
  return e;
}

int Estimate(const Global& g, const EstimateFlags& f) {
  RequireInstance(f.instance);
  const double t0 = f.t0 ? *f.t0 : DefaultT0();
  ConfigEcho(g, "estimate")
      .Add("instance", Describe(f.instance))
      .Add("t0", Fmt(t0))
      .Add("grid", Fmt(f.grid))
      .Add("ensemble", f.ensemble)
      .Add("all_pairs", f.all_pairs)
      .Print(g);
  InstancePtr in = ReadyInstance(g, f.instance);
  EstimatePtr e = RunEstimate(g, in.get(), t0, f.grid, f.ensemble, f.all_pairs);
  char* csv = nullptr;
  Check(sm_estimate_to_csv(e.get(), &csv));
  StringPtr c(csv);
  Emit(g, c.get());
  return kExitOk;
}

struct SimulateFlags {
  InstanceFlags instance;
  std::string algorithm = "generalized";
  std::optional<double> t0;
  std::optional<double> t1;
  std::uint64_t trials = 100000;
  double grid = 1e-2;
  std::string estimates;
  std::uint64_t ensemble = 100000;
  bool all_pairs = false;
};

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Exit{kExitUsage, "cannot open " + path};
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

int Simulate(const Global& g, const SimulateFlags& f) {
  RequireInstance(f.instance);
  sm_simulate_options o;
  sm_simulate_options_init(&o);
  Check(sm_algorithm_parse(f.algorithm.c_str(), &o.algorithm));
  if (o.algorithm == SM_ALG_OPTIMAL_G) {
    if (!f.instance.k || !f.t0 || !f.t1) {
      throw Exit{kExitUsage, "--algorithm optimal-g needs --k, --t0 and --t1"};
    }
    o.k = *f.instance.k;
    o.t0 = *f.t0;
    o.t1 = *f.t1;
  } else {
    if (f.t1) throw Exit{kExitUsage, "--t1 only applies to --algorithm optimal-g"};
    if (o.algorithm != SM_ALG_SUGGESTED) o.t0 = f.t0 ? *f.t0 : DefaultT0();
  }
  const bool needs_estimate = o.algorithm == SM_ALG_GENERALIZED || o.algorithm == SM_ALG_AUXILIARY;
  if (!needs_estimate && !f.estimates.empty()) {
    throw Exit{kExitUsage, "--estimates only applies to the generalized and auxiliary algorithms"};
  }
  o.trials = f.trials;
  o.seed = g.seed;
  o.grid_step = f.grid;
  o.threads = g.threads;
  o.all_pairs = f.all_pairs ? 1 : 0;

  ConfigEcho echo(g, "simulate");
  echo.Add("instance", Describe(f.instance)).Add("algorithm", f.algorithm);
  if (o.algorithm == SM_ALG_OPTIMAL_G) echo.Add("k", Fmt(o.k));
  if (o.algorithm != SM_ALG_SUGGESTED) echo.Add("t0", Fmt(o.t0));
  if (o.algorithm == SM_ALG_OPTIMAL_G) echo.Add("t1", Fmt(o.t1));
  echo.Add("trials", o.trials).Add("grid", Fmt(o.grid_step)).Add("all_pairs", f.all_pairs);
  if (needs_estimate) {
    if (f.estimates.empty()) {
      echo.Add("ensemble", f.ensemble);
    } else {
      echo.Add("estimates", f.estimates);
    }
  }
  echo.Print(g);

  InstancePtr in = needs_estimate ? ReadyInstance(g, f.instance) : LoadInstance(g, f.instance);
  if (!needs_estimate) RequireValid(in.get());
  EstimatePtr est;
  if (needs_estimate) {
    if (f.estimates.empty()) {
      est = RunEstimate(g, in.get(), o.t0, f.grid, f.ensemble, f.all_pairs);
    } else {
      sm_estimate* e = nullptr;
      Check(sm_estimate_from_csv(ReadFile(f.estimates).c_str(), in.get(), o.t0, &e));
      est.reset(e);
    }
  }
  sm_report* rep = nullptr;
  Check(sm_simulate(in.get(), &o, est.get(), &rep));
  ReportPtr report(rep);
  char* csv = nullptr;
  Check(sm_report_to_csv(report.get(), &csv));
  StringPtr c(csv);
  Emit(g, c.get());
  sm_report_summary s{};
  Check(sm_report_summary_get(report.get(), &s));
  Log(g, "trials=" + std::to_string(s.trials) + " mean_objective=" + Fmt(s.mean_objective) +
             " objective_se=" + Fmt(s.objective_se) +
             " second_class_decisions=" + std::to_string(s.second_class_decisions) +
             " clamps=" + std::to_string(s.clamps) +
             " excess_clamps=" + std::to_string(s.excess_clamps) +
             " floors=" + std::to_string(s.floors) +
             " partition_violations=" + std::to_string(s.partition_violations));
  return s.partition_violations == 0 && s.rematch_attempts == 0 ? kExitOk : kExitCheckFailed;
}

void PrintProgress(const char* line, void* user) {
  const auto* g = static_cast<const Global*>(user);
  Log(*g, line);
}

int Reproduce(const Global& g) {
  ConfigEcho(g, "reproduce").Print(g);
  char* table = nullptr;
  int ok = 0;
  Check(sm_reproduce(g.threads, g.seed, PrintProgress, const_cast<Global*>(&g), &table, &ok));
  StringPtr t(table);
  Emit(g, t.get());
  Log(g, ok ? "reproduce: all checks passed" : "reproduce: some checks FAILED");
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online stochastic matching: hardness curves, threshold optimization, "
               "estimation and simulation"};
  app.fallthrough();
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads, 0 for all cores")->capture_default_str();
  app.add_option("--out", g.out, "Write the result here instead of stdout");
  app.add_flag("--quiet", g.quiet, "Suppress the config echo and summaries on stderr");

  InstanceFlags validate_flags;
  auto* validate = app.add_subcommand("validate", "Check an instance against the LP constraints");
  AddInstanceFlags(validate, validate_flags);

  CurvesFlags curves_flags;
  auto* curves = app.add_subcommand("curves", "Closed-form curves of a threshold policy on G(k)");
  curves->add_option("--k", curves_flags.k, "Weight k of G(k)")->capture_default_str();
  curves->add_option("--t0", curves_flags.t0, "Threshold with both neighbors free")
      ->capture_default_str();
  curves->add_option("--t1", curves_flags.t1, "Threshold with one neighbor free")
      ->capture_default_str();
  curves->add_option("--step", curves_flags.step, "Grid step")->capture_default_str();

  OptimizeFlags optimize_flags;
  auto* optimize = app.add_subcommand("optimize", "Hardness optimum or restricted threshold");
  optimize->add_option("--mode", optimize_flags.mode, "hard or restricted")
      ->check(CLI::IsMember({"hard", "restricted"}))
      ->capture_default_str();
  optimize->add_option("--tol", optimize_flags.tol, "Coordinate tolerance (default per mode)")
      ->check(CLI::PositiveNumber);

  EstimateFlags estimate_flags;
  auto* estimate = app.add_subcommand("estimate", "Grid estimates of pair probabilities");
  AddInstanceFlags(estimate, estimate_flags.instance);
  estimate->add_option("--t0", estimate_flags.t0, "Threshold (default: restricted optimum)");
  estimate->add_option("--grid", estimate_flags.grid, "Grid step")->capture_default_str();
  estimate->add_option("--ensemble", estimate_flags.ensemble, "Ensemble size")
      ->capture_default_str();
  estimate->add_flag("--all-pairs", estimate_flags.all_pairs, "Estimate every offline pair");

  SimulateFlags simulate_flags;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of a matching policy");
  AddInstanceFlags(simulate, simulate_flags.instance);
  simulate->add_option("--algorithm", simulate_flags.algorithm, "Policy")
      ->check(CLI::IsMember({"optimal-g", "restricted", "generalized", "auxiliary", "suggested"}))
      ->capture_default_str();
  simulate->add_option("--t0", simulate_flags.t0, "Threshold t0");
  simulate->add_option("--t1", simulate_flags.t1, "Threshold t1 (optimal-g)");
  simulate->add_option("--trials", simulate_flags.trials, "Trials")->capture_default_str();
  simulate->add_option("--grid", simulate_flags.grid, "Grid step of the reported curves")
      ->capture_default_str();
  simulate->add_option("--estimates", simulate_flags.estimates, "Estimate CSV to reuse")
      ->check(CLI::ExistingFile);
  simulate->add_option("--ensemble", simulate_flags.ensemble,
                       "Ensemble size when estimating on the fly")
      ->capture_default_str();
  simulate->add_flag("--all-pairs", simulate_flags.all_pairs, "Report every offline pair");

  auto* reproduce = app.add_subcommand("reproduce", "Run the full reproduction check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return Validate(g, validate_flags);
    if (curves->parsed()) return Curves(g, curves_flags);
    if (optimize->parsed()) return Optimize(g, optimize_flags);
    if (estimate->parsed()) return Estimate(g, estimate_flags);
    if (simulate->parsed()) return Simulate(g, simulate_flags);
    if (reproduce->parsed()) return Reproduce(g);
  } catch (const Exit& e) {
    std::cerr << e.message << '\n';
    return e.code;
  }
  return kExitUsage;
}
