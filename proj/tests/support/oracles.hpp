#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "satopt/channel.hpp"
#include "satopt/config.hpp"
#include "satopt/problem.hpp"
#include "satopt/subproblem.hpp"

namespace satopt::testing {

/// J_n(u) from the ascending series in 50-digit arithmetic, summed until the
/// term magnitude drops below 1e-18.
inline double bessel_series_oracle(int n, double u) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const Big half = Big(u) / 2;
  Big term = boost::multiprecision::pow(half, n);
  for (int k = 1; k <= n; ++k) term /= k;
  Big sum = term;
  const Big q = -half * half;
  for (int m = 1; m < 500; ++m) {
    term *= q / (Big(m) * Big(m + n));
    sum += term;
    if (boost::multiprecision::abs(term) < Big(1e-18) && m > static_cast<int>(u)) break;
  }
  return sum.convert_to<double>();
}

/// Central difference of phi_ik = log2(sum_j g_jik 2^{y_j} + noise_ik) in
/// 50-digit arithmetic, so only the O(h^2) truncation error remains.
inline Eigen::VectorXd phi_central_difference(const Eigen::VectorXd& y_k, const ChannelMatrix& g,
                                              int user, int sc, double h = 1e-5) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  auto phi = [&](const std::vector<Big>& y) {
    Big sum = Big(g.noise(user, sc));
    for (std::size_t j = 0; j < y.size(); ++j) {
      sum += Big(g.gain(static_cast<int>(j), user, sc)) * boost::multiprecision::pow(Big(2), y[j]);
    }
    return boost::multiprecision::log(sum) / boost::multiprecision::log(Big(2));
  };
  std::vector<Big> base(y_k.data(), y_k.data() + y_k.size());
  Eigen::VectorXd fd(y_k.size());
  for (Eigen::Index l = 0; l < y_k.size(); ++l) {
    std::vector<Big> up = base, dn = base;
    up[l] += h;
    dn[l] -= h;
    fd(l) = ((phi(up) - phi(dn)) / (2 * Big(h))).convert_to<double>();
  }
  return fd;
}

/// A two-beam, single-subcarrier instance with default-system magnitudes.
struct ToyInstance {
  SystemConfig cfg;
  ChannelMatrix g;
  TrafficDemand demand;
};

inline ToyInstance make_toy_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ToyInstance t;
  t.cfg.n_beams = 2;
  t.cfg.n_subcarriers = 1;
  t.cfg.p_beam_max_w = 100.0;
  t.cfg.p_tot_max_w = 150.0;
  const double w_choices[] = {0.0, 1e6, 3e6, 1e7};
  t.cfg.weight_w_bps_per_watt = w_choices[seed % 4];
  t.g = ChannelMatrix(2, 1);
  const double nominal = db_to_linear(52.0 + 41.7 - 210.0);
  for (int i = 0; i < 2; ++i) {
    const double direct = nominal * db_to_linear(-6.0 * u01(rng));
    t.g.gain(i, i, 0) = direct;
    t.g.gain(1 - i, i, 0) = direct * std::pow(10.0, -3.0 + 2.5 * u01(rng));
    t.g.noise(i, 0) = t.cfg.noise_power_w;
  }
  const double r = 0.3e9 + 0.7e9 * u01(rng);
  t.demand = demand_from_slope(r, 2);
  return t;
}

struct GridBest {
  double objective = std::numeric_limits<double>::infinity();
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Exhaustive search of f = USC + w P_tot over an n x n uniform power grid on
/// [0, P_max]^2 restricted to p1 + p2 <= P_tot.
inline GridBest power_grid_oracle(const ToyInstance& t, int n = 400) {
  GridBest best;
  PowerAllocation p(2, 1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double p1 = t.cfg.p_beam_max_w * a / (n - 1);
      const double p2 = t.cfg.p_beam_max_w * b / (n - 1);
      if (p1 + p2 > t.cfg.p_tot_max_w) continue;
      p.p(0, 0) = p1;
      p.p(1, 0) = p2;
      const double f = objective(p, t.g, t.cfg, t.demand);
      if (f < best.objective) best = {f, p1, p2};
    }
  }
  return best;
}

/// Minimum of the convex subproblem objective sum_i max(C_req - C~_i(y, y_bar), 0)
/// + w sum 2^y over an n x n grid in y (box [log2 p_floor, log2 P_max]^2, power
/// budgets enforced), followed by one n x n zoom around the best cell.
inline double subproblem_grid_oracle(const ToyInstance& t, const LogPower& y_bar, int n = 400) {
  const double lo0 = std::log2(t.cfg.p_floor_w);
  const double hi0 = std::log2(t.cfg.p_beam_max_w);
  double best = std::numeric_limits<double>::infinity();
  double best_a = lo0, best_b = lo0;
  auto scan = [&](double lo_a, double hi_a, double lo_b, double hi_b) {
    LogPower y(Eigen::MatrixXd::Zero(2, 1));
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double ya = lo_a + (hi_a - lo_a) * a / (n - 1);
        const double yb = lo_b + (hi_b - lo_b) * b / (n - 1);
        if (ya < lo0 || yb < lo0 || ya > hi0 || yb > hi0) continue;
        if (std::exp2(ya) + std::exp2(yb) > t.cfg.p_tot_max_w) continue;
        y.y(0, 0) = ya;
        y.y(1, 0) = yb;
        double f = t.cfg.weight_w_bps_per_watt * (std::exp2(ya) + std::exp2(yb));
        for (int i = 0; i < 2; ++i) {
          f += std::max(t.demand.c_req_bps[i] - linearize_capacity(y, y_bar, t.g, t.cfg, i), 0.0);
        }
        if (f < best) {
          best = f;
          best_a = ya;
          best_b = yb;
        }
      }
    }
  };
  scan(lo0, hi0, lo0, hi0);
  const double cell = 2.0 * (hi0 - lo0) / (n - 1);
  scan(best_a - cell, best_a + cell, best_b - cell, best_b + cell);
  return best;
}

}  // namespace satopt::testing
