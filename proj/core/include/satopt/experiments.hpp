#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satopt/config.hpp"
#include "satopt/problem.hpp"
#include "satopt/sca.hpp"

namespace satopt {

/// Start-point descriptor: `mu:<x>` is x times the uniform allocation,
/// `random:<n>` expands to n seeded random starts.
struct StartSpec {
  enum class Kind { kScaledUpa, kRandom };
  Kind kind = Kind::kScaledUpa;
  double mu = 1.0;
  int count = 1;

  static StartSpec scaled_upa(double mu) { return {Kind::kScaledUpa, mu, 1}; }
  static StartSpec random(int count) { return {Kind::kRandom, 1.0, count}; }

  bool operator==(const StartSpec&) const = default;
};

/// Parses a comma-separated list such as "mu:0.1,mu:1.0,random:3".
std::vector<StartSpec> parse_starts(std::string_view text);
StartSpec parse_start(std::string_view token);
std::string format_start(const StartSpec& start);

struct NamedStart {
  std::string id;  // "mu:0.5", "random:1", ...
  PowerAllocation p;
};

/// Materialises descriptors into allocations. Random start j (1-based across
/// all random descriptors) draws every entry uniformly on
/// [p_floor, P_tot / (N K)] from a generator seeded with (seed, j) and is
/// scaled down if a budget is exceeded. Throws std::invalid_argument for a
/// start outside the feasible set (e.g. mu > 1).
std::vector<NamedStart> make_starts(const std::vector<StartSpec>& starts, const SystemConfig& cfg,
                                    std::uint64_t seed);

struct ExperimentSpec {
  SystemConfig base_config;
  int n_trials = 200;
  std::uint64_t base_seed = 1;
  // Fixed scene for the convergence and weight sweeps.
  std::uint64_t scene_seed = 4;
  double r_bps = 0.7e9;  // slope for solve, convergence and weight sweeps
  std::vector<double> r_grid_bps = {0.1e9, 0.2e9, 0.3e9, 0.4e9, 0.5e9,
                                    0.6e9, 0.7e9, 0.8e9, 0.9e9, 1.0e9};
  std::vector<double> w_grid_bps_per_w = {0.0, 1e6, 3e6, 1e7, 3e7, 1e8};
  // SCA weights compared in the convergence and slope sweeps.
  std::vector<double> scheme_w_bps_per_w = {0.0, 1e7};
  std::vector<StartSpec> starts = {StartSpec::scaled_upa(0.1), StartSpec::scaled_upa(0.5),
                                   StartSpec::scaled_upa(1.0), StartSpec::random(2)};

  std::uint64_t trial_seed(int trial_index) const {
    return base_seed + static_cast<std::uint64_t>(trial_index);
  }

  bool operator==(const ExperimentSpec&) const = default;
};

/// Throws std::invalid_argument naming the first violated invariant
/// (including those of base_config). Grids may be empty here; each
/// experiment checks the grid it uses.
void validate(const ExperimentSpec& spec);

struct RunOptions {
  int jobs = 1;  // worker threads; results never depend on it
  ScaOptions sca = [] {
    ScaOptions o;
    o.keep_iterates = false;
    return o;
  }();
};

struct TrialResult {
  int trial_index = 0;
  std::uint64_t seed = 0;
  MetricsReport upa;
  MetricsReport sca;
  ScaTrace trace;
};

/// Scene seed base_seed + trial_index, UPA metrics at weight w, SCA from UPA.
/// A failed subproblem is rethrown as ScaError prefixed with the trial context.
TrialResult run_trial(const ExperimentSpec& spec, int trial_index, double r_bps, double w_bps_per_w,
                      const ScaOptions& options = RunOptions{}.sca);

struct ConvergenceTrace {
  double w_bps_per_w = 0.0;
  std::string start_id;
  ScaTrace trace;
};

/// One trace per (w, start) on the fixed scene, ordered by w then start.
std::vector<ConvergenceTrace> convergence_experiment(const ExperimentSpec& spec, double r_bps,
                                                     const std::vector<double>& w_list,
                                                     const std::vector<StartSpec>& starts,
                                                     const RunOptions& options = {});

/// One measurement: a scheme ("upa" or "sca") on one trial at one (w, r).
struct TrialRow {
  std::string scheme;
  double w_bps_per_w = 0.0;
  double r_bps = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double usc_bps = 0.0;
  double p_tot_w = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  // SCA audits (neutral for UPA rows).
  int infeasible_iterates = 0;
  int epigraph_violations = 0;
  double max_relative_increase = 0.0;
  bool bound_applicable = false;
  bool bound_holds = true;
  double bound_rhs = 0.0;
  bool allocation_feasible = true;
};

struct Statistic {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;         // sample standard deviation, 0 for n == 1
  double std_error = 0.0;  // sd / sqrt(n)
  double min = 0.0;
  double max = 0.0;
};

/// Mean, sample sd and standard error. Throws std::invalid_argument if empty.
Statistic summarize(const std::vector<double>& values);

struct AggregatePoint {
  std::string scheme;
  double w_bps_per_w = 0.0;
  double r_bps = 0.0;
  Statistic usc_bps;
  Statistic p_tot_w;
  Statistic objective;
  Statistic iterations;
};

struct AggregateResult {
  std::vector<AggregatePoint> points;  // sorted by (r, scheme, w)
  std::vector<TrialRow> rows;          // sorted by (r, scheme, w, trial)
};

/// Groups rows by (scheme, w, r). The result does not depend on row order.
/// Throws std::invalid_argument when rows is empty.
AggregateResult aggregate(std::vector<TrialRow> rows);

/// For each r in r_grid and each trial: UPA (reported at w = 0, so its
/// objective equals its USC) and SCA from UPA at every scheme weight, all on
/// the same scene.
AggregateResult slope_sweep(const ExperimentSpec& spec, const RunOptions& options = {});

struct ParetoPoint {
  double w_bps_per_w = 0.0;
  double usc_bps = 0.0;
  double p_tot_w = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// One SCA solve from UPA per weight of spec.w_grid_bps_per_w on the scene
/// drawn with scene_seed; sorted by w. The grid is checked with
/// validate_pareto_grid.
std::vector<ParetoPoint> weight_sweep(const ExperimentSpec& spec, std::uint64_t scene_seed,
                                      double r_bps, const RunOptions& options = {});

/// Throws std::invalid_argument unless the grid has >= 5 distinct points and
/// either contains 0 or has max / min >= 1e3.
void validate_pareto_grid(const std::vector<double>& w_grid);

/// Runs fn(0..n-1) on up to `jobs` threads and returns results by index.
/// The exception of the lowest failing index is rethrown after all workers
/// finish.
template <class T, class Fn>
std::vector<T> parallel_map(int n, int jobs, Fn&& fn);

}  // namespace satopt

#include "satopt/detail/parallel.hpp"
