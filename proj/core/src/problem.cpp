#include "satopt/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace satopt {

namespace {

void check_shape(const PowerAllocation& p, const ChannelMatrix& g) {
  if (p.n_beams() != g.n_beams() || p.n_subcarriers() != g.n_subcarriers()) {
    throw std::invalid_argument("power allocation shape does not match channel");
  }
}

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double sinr(const PowerAllocation& p, const ChannelMatrix& g, int user, int sc) {
  check_shape(p, g);
  if (user < 0 || user >= g.n_beams() || sc < 0 || sc >= g.n_subcarriers()) {
    throw std::invalid_argument("sinr: index out of range");
  }
  double interference = g.noise(user, sc);
  for (int j = 0; j < g.n_beams(); ++j) {
    if (j != user) interference += g.gain(j, user, sc) * p.p(j, sc);
  }
  return g.gain(user, user, sc) * p.p(user, sc) / interference;
}

double capacity(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg, int user) {
  double bits = 0.0;
  for (int k = 0; k < g.n_subcarriers(); ++k) {
    bits += std::log1p(cfg.acm_zeta * sinr(p, g, user, k));
  }
  return cfg.sc_bandwidth_hz * bits / std::numbers::ln2;
}

double usc(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
           const TrafficDemand& demand) {
  if (static_cast<int>(demand.c_req_bps.size()) != g.n_beams()) {
    throw std::invalid_argument("usc: demand size does not match channel");
  }
  double total = 0.0;
  for (int i = 0; i < g.n_beams(); ++i) {
    total += std::max(demand.c_req_bps[i] - capacity(p, g, cfg, i), 0.0);
  }
  return total;
}

double total_power(const PowerAllocation& p) {
  CompensatedSum s;
  for (int i = 0; i < p.n_beams(); ++i)
    for (int k = 0; k < p.n_subcarriers(); ++k) s.add(p.p(i, k));
  return s.value();
}

double objective(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
                 const TrafficDemand& demand) {
  return scalarize(usc(p, g, cfg, demand), total_power(p), cfg.weight_w_bps_per_watt);
}

MetricsReport evaluate(const PowerAllocation& p, const ChannelMatrix& g, const SystemConfig& cfg,
                       const TrafficDemand& demand) {
  if (static_cast<int>(demand.c_req_bps.size()) != g.n_beams()) {
    throw std::invalid_argument("evaluate: demand size does not match channel");
  }
  MetricsReport m;
  for (int i = 0; i < g.n_beams(); ++i) {
    const double c = capacity(p, g, cfg, i);
    m.capacity_bps.push_back(c);
    m.usc_bps += std::max(demand.c_req_bps[i] - c, 0.0);
  }
  m.p_tot_w = total_power(p);
  m.objective = scalarize(m.usc_bps, m.p_tot_w, cfg.weight_w_bps_per_watt);
  return m;
}

FeasibilityReport is_feasible(const PowerAllocation& p, const SystemConfig& cfg) {
  FeasibilityReport report;
  auto flag = [&](std::string name, double magnitude) {
    report.feasible = false;
    report.violations.push_back({std::move(name), magnitude});
  };
  if (p.n_beams() != cfg.n_beams || p.n_subcarriers() != cfg.n_subcarriers) {
    flag("shape", 0.0);
    return report;
  }
  for (int i = 0; i < p.n_beams(); ++i) {
    for (int k = 0; k < p.n_subcarriers(); ++k) {
      const double v = p.p(i, k);
      if (!std::isfinite(v) || v < -kFeasibilitySlackW) {
        flag("nonneg[" + std::to_string(i) + "," + std::to_string(k) + "]", -v);
      }
    }
    CompensatedSum beam;
    for (int k = 0; k < p.n_subcarriers(); ++k) beam.add(p.p(i, k));
    const double excess = beam.value() - cfg.p_beam_max_w;
    if (!(excess <= kFeasibilitySlackW)) flag("beam[" + std::to_string(i) + "]", excess);
  }
  const double excess = total_power(p) - cfg.p_tot_max_w;
  if (!(excess <= kFeasibilitySlackW)) flag("total", excess);
  return report;
}

PowerAllocation upa(const SystemConfig& cfg) {
  const double each = cfg.p_tot_max_w / (static_cast<double>(cfg.n_beams) * cfg.n_subcarriers);
  return PowerAllocation(cfg.n_beams, cfg.n_subcarriers, each);
}

TrafficDemand demand_from_slope(double r_bps, int n_users) {
  if (!(r_bps >= 0.0)) throw std::invalid_argument("demand_from_slope: slope must be >= 0");
  TrafficDemand d;
  d.slope_r_bps = r_bps;
  for (int i = 1; i <= n_users; ++i) d.c_req_bps.push_back(r_bps * i);
  return d;
}

}  // namespace satopt
