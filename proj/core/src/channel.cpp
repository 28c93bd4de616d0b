#include "satopt/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "satopt/bessel.hpp"

namespace satopt {

namespace {

constexpr double kPatternScale = 2.07123;

struct Vec3 {
  double x, y, z;
};

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

}  // namespace

ChannelMatrix::ChannelMatrix(int n_beams, int n_subcarriers)
    : n_(n_beams),
      k_(n_subcarriers),
      gain_(static_cast<std::size_t>(n_beams) * n_beams * n_subcarriers, 0.0),
      noise_(Eigen::MatrixXd::Zero(n_beams, n_subcarriers)) {
  if (n_beams <= 0 || n_subcarriers <= 0) {
    throw std::invalid_argument("ChannelMatrix: dimensions must be positive");
  }
}

double antenna_gain(double theta_rad, double g_max_linear, double theta_3db_rad) {
  if (theta_rad == 0.0) return g_max_linear;
  const double u = kPatternScale * std::abs(std::sin(theta_rad)) / std::sin(theta_3db_rad);
  const double lobe = 0.5 * bessel_j_scaled(1, u) + 36.0 * bessel_j_scaled(3, u);
  return g_max_linear * lobe * lobe;
}

std::vector<Point2> beam_layout(int n_beams, double beam_radius_km) {
  if (!(beam_radius_km > 0.0)) {
    throw std::invalid_argument("beam_layout: beam radius must be > 0");
  }
  if (n_beams == 1) return {Point2{0.0, 0.0}};
  if (n_beams != 7) {
    throw std::invalid_argument("beam_layout: unsupported beam count " + std::to_string(n_beams) +
                                " (expected 1 or 7)");
  }
  std::vector<Point2> centers{{0.0, 0.0}};
  const double ring = std::sqrt(3.0) * beam_radius_km;
  for (int a = 0; a < 6; ++a) {
    const double phi = deg_to_rad(60.0 * a);
    centers.push_back({ring * std::cos(phi), ring * std::sin(phi)});
  }
  return centers;
}

Scene sample_scene(const SystemConfig& cfg, std::uint64_t seed) {
  Scene scene;
  scene.rng_seed = seed;
  scene.beam_centers_km = beam_layout(cfg.n_beams, cfg.beam_radius_km);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Moment-matched lognormal for the dB attenuation.
  const double cv = cfg.rain_mean_db > 0.0 ? cfg.rain_std_db / cfg.rain_mean_db : 0.0;
  const double sigma_ln = std::sqrt(std::log1p(cv * cv));
  const double mu_ln = cfg.rain_mean_db > 0.0 ? std::log(cfg.rain_mean_db) - 0.5 * sigma_ln * sigma_ln : 0.0;
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (const Point2& c : scene.beam_centers_km) {
    const double r = cfg.beam_radius_km * std::sqrt(unit(rng));
    const double phi = 2.0 * M_PI * unit(rng);
    scene.user_positions_km.push_back({c.x + r * std::cos(phi), c.y + r * std::sin(phi)});

    const double z = gauss(rng);
    const double rain = cfg.rain_std_db > 0.0 ? std::exp(mu_ln + sigma_ln * z) : cfg.rain_mean_db;
    scene.rain_atten_db.push_back(rain);
  }
  return scene;
}

double boresight_angle(double sat_altitude_km, Point2 beam_center_km, Point2 user_km) {
  const Vec3 a{beam_center_km.x, beam_center_km.y, -sat_altitude_km};
  const Vec3 b{user_km.x, user_km.y, -sat_altitude_km};
  // Same angle as acos(a.b / |a||b|) without its loss of precision near zero.
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

ChannelMatrix build_channel(const SystemConfig& cfg, const Scene& scene) {
  const int n = cfg.n_beams;
  const int k_count = cfg.n_subcarriers;
  if (static_cast<int>(scene.beam_centers_km.size()) != n ||
      static_cast<int>(scene.user_positions_km.size()) != n ||
      static_cast<int>(scene.rain_atten_db.size()) != n) {
    throw std::invalid_argument("build_channel: scene size does not match n_beams");
  }

  ChannelMatrix ch(n, k_count);
  const double g_max = db_to_linear(cfg.g_max_dbi);
  const double theta_3db = deg_to_rad(cfg.theta_3db_deg);
  const double budget_db = cfg.user_gain_dbi - cfg.fspl_db;

  for (int i = 0; i < n; ++i) {
    const double rx_scale = db_to_linear(budget_db - scene.rain_atten_db[i]);
    for (int j = 0; j < n; ++j) {
      const double theta =
          boresight_angle(cfg.sat_altitude_km, scene.beam_centers_km[j], scene.user_positions_km[i]);
      double g = antenna_gain(theta, g_max, theta_3db) * rx_scale;
      if (!std::isfinite(g) || g < kMinGain) {
        g = kMinGain;
        ++ch.clamped_gains;
      }
      for (int k = 0; k < k_count; ++k) ch.gain(j, i, k) = g;
    }
    for (int k = 0; k < k_count; ++k) ch.noise(i, k) = cfg.noise_power_w;
  }
  return ch;
}

}  // namespace satopt
