#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "satopt/channel.hpp"
#include "satopt/config.hpp"
#include "satopt/problem.hpp"
#include "satopt/subproblem.hpp"

namespace satopt {

struct ScaOptions {
  SubproblemOptions subproblem;
  double descent_slack = 1e-6;             // allowed relative increase of F per step
  double zero_objective = 1e-12;           // F at or below this (solver units) counts as converged
  double epigraph_slack = 1e-6;            // solver units (Mbps)
  bool keep_iterates = true;
};

/// Record of one SCA run.
///
/// objective_per_iter[l] is F(y_l, t_l) in bps; entry 0 is the start point.
/// iterations counts convex solves.
struct ScaTrace {
  std::vector<double> objective_per_iter;
  std::vector<PowerAllocation> iterates;  // p_0 .. p_nu when keep_iterates
  std::vector<double> wall_time_per_iter;  // seconds, one per solve
  std::vector<int> newton_steps_per_iter;
  PowerAllocation final_allocation;
  MetricsReport final_metrics;
  int iterations = 0;
  double bound_rhs = 0.0;
  bool converged = false;

  // Runtime audits.
  int infeasible_iterates = 0;
  int epigraph_violations = 0;
  double max_relative_increase = 0.0;
  std::string message;
};

/// Raised when a convex subproblem fails; carries the trace up to the failure.
class ScaError : public std::runtime_error {
 public:
  ScaError(const std::string& what, ScaTrace partial)
      : std::runtime_error(what), trace(std::move(partial)) {}
  ScaTrace trace;
};

/// Successive convex approximation from p_start with the relative-decrease
/// stopping rule |F_l - F_{l-1}| <= eps |F_{l-1}| (eps = cfg.tolerance_eps).
///
/// Throws std::invalid_argument when p_start is outside the feasible set and
/// ScaError when a subproblem does not converge.
ScaTrace run_sca(const ChannelMatrix& g, const SystemConfig& cfg, const TrafficDemand& demand,
                 const PowerAllocation& p_start, const ScaOptions& options = {});

struct BoundReport {
  bool applicable = false;
  bool holds = false;
  int iterations = 0;
  double rhs = 0.0;  // 1 + (F_0 / F_nu - 1) / eps
  std::string message;
};

/// Audits nu <= 1 + (F_0 / F_nu - 1) / eps. Skipped (applicable == false)
/// when F_nu <= 0 or the run did not converge.
BoundReport check_iteration_bound(const ScaTrace& trace, double eps);

}  // namespace satopt
