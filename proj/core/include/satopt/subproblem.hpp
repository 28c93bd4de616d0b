#pragma once

#include <string>

#include <Eigen/Core>

#include "satopt/channel.hpp"
#include "satopt/config.hpp"
#include "satopt/problem.hpp"

namespace satopt {

/// Base-2 logarithms of the transmit powers, y = log2(p). Same N x K layout
/// as PowerAllocation.
struct LogPower {
  Eigen::MatrixXd y;

  LogPower() = default;
  explicit LogPower(Eigen::MatrixXd values) : y(std::move(values)) {}
};

/// Capacity shortfall per user, in bps.
struct EpigraphVars {
  Eigen::VectorXd t;
};

/// phi(i,k) and theta(i,k): the two convex log-sum-exp terms whose difference
/// is the per-subcarrier spectral efficiency log2(1 + zeta * sinr).
struct DCParts {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd theta;
};

LogPower to_log_power(const PowerAllocation& p, double p_floor_w);
PowerAllocation to_power(const LogPower& y);

/// log2(sum_j g_ji 2^{y_j} + sigma^2) over the subcarrier slice y_k (length N).
/// The direct term j == i carries the ACM factor zeta.
double phi_eval(const Eigen::VectorXd& y_k, const ChannelMatrix& g, int user, int sc,
                double zeta = 1.0);

/// As phi_eval with j == i left out (interference plus noise only).
double theta_eval(const Eigen::VectorXd& y_k, const ChannelMatrix& g, int user, int sc);

/// d phi / d y_l = g_li 2^{y_l} / (sum_j g_ji 2^{y_j} + sigma^2).
///
/// The ln 2 from differentiating 2^y cancels the 1/ln 2 of log2, so this
/// closed form is the exact gradient.
Eigen::VectorXd phi_gradient(const Eigen::VectorXd& y_k, const ChannelMatrix& g, int user, int sc,
                             double zeta = 1.0);

DCParts dc_parts(const LogPower& y, const ChannelMatrix& g, double zeta = 1.0);

/// Concave lower model of user i's capacity (bps): phi linearised at y_bar,
/// theta kept exact. Tangent to capacity(2^y) at y == y_bar.
double linearize_capacity(const LogPower& y, const LogPower& y_bar, const ChannelMatrix& g,
                          const SystemConfig& cfg, int user);

struct SubproblemOptions {
  double kkt_tolerance = 1e-6;
  double gap_tolerance = 1e-8;  // final s'lambda
  double barrier_growth = 10.0;
  double armijo_alpha = 0.25;
  double backtrack_beta = 0.5;
  double newton_tolerance = 1e-9;  // decrement^2 / 2 at which a stage is centred
  int max_newton_per_stage = 100;
  int max_polish_iterations = 50;
  // Capacities enter the solver in Mbps and w in Mbps/W.
  double capacity_unit_bps = 1e6;
};

struct SubproblemSolution {
  LogPower y_star;
  EpigraphVars t_star;
  double objective_value = 0.0;  // F(y*, t*) in bps
  double kkt_residual = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  int barrier_iterations = 0;  // Newton systems factorised, both phases
  int barrier_stages = 0;
  bool converged = false;
  std::string message;
};

/// Globally solves
///   min  sum_i t_i + w sum_{i,k} 2^{y_ik}
///   s.t. t_i >= 0,  t_i >= C_req_i - C~_i(y, y_bar),
///        sum_k 2^{y_ik} <= P_max,  sum_{i,k} 2^{y_ik} <= P_tot,
///        y >= log2(p_floor)
/// by log-barrier path following (tau x10 per stage, backtracking Newton),
/// then a few primal-dual Newton steps from the last centred point to push
/// the KKT residual down to round-off.
///
/// Never throws on numerical trouble; check `converged` and `message`.
SubproblemSolution solve_subproblem(const ChannelMatrix& g, const SystemConfig& cfg,
                                    const TrafficDemand& demand, const LogPower& y_bar,
                                    const SubproblemOptions& options = {});

}  // namespace satopt
