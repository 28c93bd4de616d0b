#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "satopt/config.hpp"

namespace satopt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// One random realisation of the service area: where each user sits and how
/// much rain fade it sees. User i is served by beam i.
struct Scene {
  std::vector<Point2> beam_centers_km;
  std::vector<Point2> user_positions_km;
  std::vector<double> rain_atten_db;
  std::uint64_t rng_seed = 0;

  bool operator==(const Scene&) const = default;
};

/// Linear power gains g[j][i][k] (beam j -> user i on subcarrier k) and the
/// per-user, per-subcarrier noise powers.
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  ChannelMatrix(int n_beams, int n_subcarriers);

  int n_beams() const { return n_; }
  int n_subcarriers() const { return k_; }

  double gain(int from_beam, int to_user, int sc) const {
    return gain_[index(from_beam, to_user, sc)];
  }
  double& gain(int from_beam, int to_user, int sc) {
    return gain_[index(from_beam, to_user, sc)];
  }
  double noise(int user, int sc) const { return noise_(user, sc); }
  double& noise(int user, int sc) { return noise_(user, sc); }

  /// Number of gains raised to the 1e-30 floor while building the matrix.
  int clamped_gains = 0;

  bool operator==(const ChannelMatrix& o) const {
    return n_ == o.n_ && k_ == o.k_ && gain_ == o.gain_ && noise_ == o.noise_;
  }

 private:
  std::size_t index(int j, int i, int k) const {
    return (static_cast<std::size_t>(k) * n_ + i) * n_ + j;
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<double> gain_;
  Eigen::MatrixXd noise_;
};

inline constexpr double kMinGain = 1e-30;

/// Satellite beam pattern G(theta) = Gmax (J1(u)/(2u) + 36 J3(u)/u^3)^2 with
/// u = 2.07123 sin(theta) / sin(theta_3db). Returns exactly g_max_linear at
/// theta == 0.
double antenna_gain(double theta_rad, double g_max_linear, double theta_3db_rad);

/// Hexagonal 7-cell cluster (outer centres at sqrt(3) R) or a single beam.
std::vector<Point2> beam_layout(int n_beams, double beam_radius_km);

/// Users uniform on the disk of each beam (r = R sqrt(U)) and one lognormal
/// rain attenuation draw per user. Deterministic in seed.
Scene sample_scene(const SystemConfig& cfg, std::uint64_t seed);

/// Angle, seen from a satellite at (0, 0, altitude), between the directions
/// to two ground points.
double boresight_angle(double sat_altitude_km, Point2 beam_center_km, Point2 user_km);

/// Link budget g = G_tx(theta_ji) G_user / (L_fspl A_rain_i), flat over
/// subcarriers; noise is the configured sigma^2 everywhere.
ChannelMatrix build_channel(const SystemConfig& cfg, const Scene& scene);

}  // namespace satopt
