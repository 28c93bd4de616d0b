#include "satopt/sca.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>

namespace satopt {

namespace {

double epigraph_objective(const Eigen::VectorXd& t_bps, const PowerAllocation& p, double w) {
  return t_bps.sum() + w * total_power(p);
}

void audit_iterate(ScaTrace& trace, const PowerAllocation& p, const Eigen::VectorXd& t_bps,
                   const ChannelMatrix& g, const SystemConfig& cfg, const TrafficDemand& demand,
                   const ScaOptions& opt) {
  if (!is_feasible(p, cfg)) ++trace.infeasible_iterates;
  const double slack = opt.epigraph_slack * opt.subproblem.capacity_unit_bps;
  for (int i = 0; i < g.n_beams(); ++i) {
    if (t_bps(i) < demand.c_req_bps[i] - capacity(p, g, cfg, i) - slack) ++trace.epigraph_violations;
  }
  if (opt.keep_iterates) trace.iterates.push_back(p);
}

}  // namespace

ScaTrace run_sca(const ChannelMatrix& g, const SystemConfig& cfg, const TrafficDemand& demand,
                 const PowerAllocation& p_start, const ScaOptions& opt) {
  if (const auto report = is_feasible(p_start, cfg); !report) {
    std::ostringstream os;
    os << "run_sca: start point is infeasible:";
    for (const auto& v : report.violations) os << ' ' << v.constraint << " by " << v.magnitude_w << " W";
    throw std::invalid_argument(os.str());
  }
  if (!(cfg.tolerance_eps > 0.0)) throw std::invalid_argument("run_sca: tolerance must be > 0");

  const double unit = opt.subproblem.capacity_unit_bps;
  const double w = cfg.weight_w_bps_per_watt;
  const double eps = cfg.tolerance_eps;

  ScaTrace trace;
  LogPower y = to_log_power(p_start, cfg.p_floor_w);
  PowerAllocation p = to_power(y);
  Eigen::VectorXd t(g.n_beams());
  for (int i = 0; i < g.n_beams(); ++i) {
    t(i) = std::max(demand.c_req_bps[i] - capacity(p, g, cfg, i), 0.0);
  }
  trace.objective_per_iter.push_back(epigraph_objective(t, p, w));
  audit_iterate(trace, p, t, g, cfg, demand, opt);

  auto finish = [&](bool converged) {
    trace.converged = converged;
    trace.final_allocation = p;
    trace.final_metrics = evaluate(p, g, cfg, demand);
    const double f0 = trace.objective_per_iter.front();
    const double fn = trace.objective_per_iter.back();
    trace.bound_rhs = fn > 0.0 ? 1.0 + (f0 / fn - 1.0) / eps : std::numeric_limits<double>::infinity();
  };

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    SubproblemSolution sol = solve_subproblem(g, cfg, demand, y, opt.subproblem);
    trace.wall_time_per_iter.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    trace.newton_steps_per_iter.push_back(sol.barrier_iterations);
    if (!sol.converged) {
      finish(false);
      std::ostringstream os;
      os << "subproblem at iteration " << iter << " did not converge: " << sol.message
         << " (kkt residual " << sol.kkt_residual << ")";
      const std::string what = os.str();
      trace.message = what;
      throw ScaError(what, std::move(trace));
    }

    y = std::move(sol.y_star);
    t = sol.t_star.t;
    p = to_power(y);
    trace.iterations = iter;
    const double prev = trace.objective_per_iter.back();
    const double cur = sol.objective_value;
    trace.objective_per_iter.push_back(cur);
    if (prev > 0.0) trace.max_relative_increase = std::max(trace.max_relative_increase, (cur - prev) / prev);
    audit_iterate(trace, p, t, g, cfg, demand, opt);

    const double prev_s = prev / unit;
    const double cur_s = cur / unit;
    if (std::abs(cur_s - prev_s) <= eps * std::abs(prev_s) || std::abs(cur_s) <= opt.zero_objective) {
      finish(true);
      return trace;
    }
  }
  finish(false);
  trace.message = "outer iteration cap reached";
  return trace;
}

BoundReport check_iteration_bound(const ScaTrace& trace, double eps) {
  BoundReport r;
  r.iterations = trace.iterations;
  if (trace.objective_per_iter.empty() || !trace.converged) {
    r.message = "skipped: run did not converge";
    return r;
  }
  const double f0 = trace.objective_per_iter.front();
  const double fn = trace.objective_per_iter.back();
  if (!(fn > 0.0)) {
    r.message = "skipped: final objective is not positive";
    return r;
  }
  r.applicable = true;
  r.rhs = 1.0 + (f0 / fn - 1.0) / eps;
  r.holds = static_cast<double>(r.iterations) <= r.rhs;
  std::ostringstream os;
  os << "iterations " << r.iterations << (r.holds ? " <= " : " > ") << r.rhs;
  if (static_cast<double>(r.iterations) == r.rhs) os << " (boundary case)";
  r.message = os.str();
  return r;
}

}  // namespace satopt
