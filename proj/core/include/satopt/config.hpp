#pragma once

#include <cmath>
#include <string>

namespace satopt {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * (M_PI / 180.0); }

/// Physical and solver parameters of one multibeam downlink.
///
/// Defaults reproduce the reference GEO Ka-band system: 7 beams, 4 subcarriers
/// of 125 MHz, -124 dBW noise, 100 W per beam, 500 W total, 210 dB FSPL,
/// rain 2.6 dB mean / 1.63 dB std, 41.7 dBi user antenna, 52 dBi beam peak,
/// 0.2 deg half-power angle, 150 km beam radius.
///
/// Fields suffixed `_db`/`_dbi` are stored in decibels; every other physical
/// quantity is linear SI.
struct SystemConfig {
  int n_beams = 7;
  int n_subcarriers = 4;
  double sc_bandwidth_hz = 125e6;
  double noise_power_w = db_to_linear(-124.0);
  double p_beam_max_w = 100.0;
  double p_tot_max_w = 500.0;
  double fspl_db = 210.0;
  double rain_mean_db = 2.6;
  double rain_std_db = 1.63;
  double user_gain_dbi = 41.7;
  double g_max_dbi = 52.0;
  double theta_3db_deg = 0.2;
  double beam_radius_km = 150.0;
  double sat_altitude_km = 35786.0;
  double carrier_ghz = 20.0;
  double weight_w_bps_per_watt = 0.0;
  double tolerance_eps = 1e-3;
  int max_outer_iters = 200;
  double p_floor_w = 1e-6;
  double acm_zeta = 1.0;

  bool operator==(const SystemConfig&) const = default;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const SystemConfig& cfg);

}  // namespace satopt
