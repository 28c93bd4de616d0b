#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "satopt/channel.hpp"
#include "satopt/config.hpp"

namespace satopt {

/// Transmit powers in watts, rows = beams, columns = subcarriers.
struct PowerAllocation {
  Eigen::MatrixXd p;

  PowerAllocation() = default;
  explicit PowerAllocation(Eigen::MatrixXd powers) : p(std::move(powers)) {}
  PowerAllocation(int n_beams, int n_subcarriers, double value = 0.0)
      : p(Eigen::MatrixXd::Constant(n_beams, n_subcarriers, value)) {}

  int n_beams() const { return static_cast<int>(p.rows()); }
  int n_subcarriers() const { return static_cast<int>(p.cols()); }
};

struct TrafficDemand {
  std::vector<double> c_req_bps;
  double slope_r_bps = 0.0;
};

struct MetricsReport {
  std::vector<double> capacity_bps;
  double usc_bps = 0.0;
  double p_tot_w = 0.0;
  double objective = 0.0;
};

struct ConstraintViolation {
  std::string constraint;  // "nonneg[i,k]", "beam[i]" or "total"
  double magnitude_w = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<ConstraintViolation> violations;

  explicit operator bool() const { return feasible; }
};

inline constexpr double kFeasibilitySlackW = 1e-9;

double sinr(const PowerAllocation& p, const ChannelMatrix& g, int user, int sc);

/// B_SC sum_k log2(1 + zeta * sinr).
double capacity(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg, int user);

double usc(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
           const TrafficDemand& demand);

/// Compensated sum of all entries.
double total_power(const PowerAllocation& p);

inline double scalarize(double usc_bps, double p_tot_w, double w_bps_per_w) {
  return usc_bps + w_bps_per_w * p_tot_w;
}

/// USC + w * P_tot, with w taken from cfg.weight_w_bps_per_watt.
double objective(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
                 const TrafficDemand& demand);

MetricsReport evaluate(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
                       const TrafficDemand& demand);

FeasibilityReport is_feasible(const PowerAllocation& p, const SystemConfig& cfg);

/// Uniform baseline: P_tot^max / (N K) in every entry.
PowerAllocation upa(const SystemConfig& cfg);

/// c_req[i] = r * (i + 1), i.e. one-based user index.
TrafficDemand demand_from_slope(double r_bps, int n_users);

}  // namespace satopt
