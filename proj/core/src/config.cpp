#include "satopt/config.hpp"

#include <stdexcept>
#include <string>

namespace satopt {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid config: " + what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const SystemConfig& c) {
  require(c.n_beams > 0, "n_beams must be > 0");
  require(c.n_subcarriers > 0, "n_subcarriers must be > 0");
  require(finite_positive(c.sc_bandwidth_hz), "sc_bandwidth_hz must be > 0");
  require(finite_positive(c.noise_power_w), "noise_power_w must be > 0");
  require(finite_positive(c.p_beam_max_w), "p_beam_max_w must be > 0");
  require(finite_positive(c.p_tot_max_w), "p_tot_max_w must be > 0");
  require(std::isfinite(c.fspl_db), "fspl_db must be finite");
  require(std::isfinite(c.rain_mean_db) && c.rain_mean_db >= 0.0, "rain_mean_db must be >= 0");
  require(std::isfinite(c.rain_std_db) && c.rain_std_db >= 0.0, "rain_std_db must be >= 0");
  require(!(c.rain_std_db > 0.0 && c.rain_mean_db <= 0.0),
          "rain_mean_db must be > 0 when rain_std_db > 0 (lognormal)");
  require(std::isfinite(c.user_gain_dbi), "user_gain_dbi must be finite");
  require(std::isfinite(c.g_max_dbi), "g_max_dbi must be finite");
  require(finite_positive(c.theta_3db_deg) && c.theta_3db_deg < 90.0,
          "theta_3db_deg must be in (0, 90)");
  require(finite_positive(c.beam_radius_km), "beam_radius_km must be > 0");
  require(finite_positive(c.sat_altitude_km), "sat_altitude_km must be > 0");
  require(finite_positive(c.carrier_ghz), "carrier_ghz must be > 0");
  require(std::isfinite(c.weight_w_bps_per_watt) && c.weight_w_bps_per_watt >= 0.0,
          "weight_w_bps_per_watt must be >= 0");
  require(finite_positive(c.tolerance_eps), "tolerance_eps must be > 0");
  require(c.max_outer_iters > 0, "max_outer_iters must be > 0");
  require(finite_positive(c.p_floor_w), "p_floor_w must be > 0");
  require(c.p_floor_w * c.n_subcarriers < c.p_beam_max_w,
          "p_floor_w * n_subcarriers must be < p_beam_max_w");
  require(c.p_floor_w * c.n_subcarriers * c.n_beams < c.p_tot_max_w,
          "p_floor_w * n_beams * n_subcarriers must be < p_tot_max_w");
  require(std::isfinite(c.acm_zeta) && c.acm_zeta > 0.0 && c.acm_zeta <= 1.0,
          "acm_zeta must be in (0, 1]");
}

}  // namespace satopt
