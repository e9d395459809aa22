#pragma once

#include "rino/radar_model.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>

namespace rino {

/// Uniform quantization noise summarized by its standard deviation.
struct QuantNoise {
  double bin_width = 0.0;
  double std_dev = 0.0;

  static QuantNoise from_bin_width(double width) {
    return QuantNoise{width, width / std::sqrt(12.0)};
  }
  double variance() const { return std_dev * std_dev; }
};

struct PhaseNoise {
  double sigma_wy = 0.0;  // rad
  double sigma_wz = 0.0;  // rad

  static PhaseNoise from_bin_width(double width_rad) {
    const double s = width_rad / std::sqrt(12.0);
    return PhaseNoise{s, s};
  }
  Eigen::Matrix2d covariance() const {
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    c(0, 0) = sigma_wy * sigma_wy;
    c(1, 1) = sigma_wz * sigma_wz;
    return c;
  }
};

struct BearingCovariance {
  Mat3 sigma_mu = Mat3::Zero();
};

/// All three per-channel quantization noises for one chirp configuration.
struct RadarNoise {
  QuantNoise range;
  QuantNoise doppler;
  PhaseNoise phase;

  static RadarNoise from_config(const ChirpConfig& cfg);
};

/// Gradient of the bearing w.r.t. the phase pair; 3x2.
/// Throws std::domain_error when 1 - (w_y^2+w_z^2)/pi^2 < 1e-6.
Eigen::Matrix<double, 3, 2> bearing_jacobian(const AoaPhases& w);

BearingCovariance bearing_covariance(const AoaPhases& w, const PhaseNoise& pn);

struct GyroTerm {
  Eigen::RowVector3d jacobian;      // mu^T (R_R^B)^T (l_BR)^x
  Mat3 avg_rate_covariance;         // Sigma_omega / N
};

/// First-order Doppler residual variance:
/// sigma_D^2 = sigma_vr^2 + v^T Sigma_mu v (+ optional gyro term).
double doppler_residual_variance(const Bearing& mu_meas, const Vec3& v_radar_est,
                                 const QuantNoise& doppler_quant,
                                 const BearingCovariance& sigma_mu,
                                 const std::optional<GyroTerm>& gyro = std::nullopt);

/// First-order covariance of the map-registration residual.
Mat3 registration_covariance(const Bearing& mu_meas, double range_meas,
                             const QuantNoise& range_quant, const BearingCovariance& sigma_mu,
                             const Mat3& rotation_world_radar, const Mat3& sigma_q);

struct McScenario {
  double true_range_m = 10.0;
  double true_radial_speed_mps = 0.0;
  double true_azimuth_rad = 0.0;
  double true_elevation_rad = 0.0;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
};

struct McStatistics {
  double range_error_mean = 0.0, range_error_std = 0.0;
  double doppler_error_mean = 0.0, doppler_error_std = 0.0;
  double phase_y_error_mean = 0.0, phase_y_error_std = 0.0;
  double phase_z_error_mean = 0.0, phase_z_error_std = 0.0;
};

/// Samples quantization-corrupted measurements of a fixed true target and
/// reports the error statistics per channel.
McStatistics mc_measurement_oracle(const ChirpConfig& cfg, const McScenario& scenario);

inline Mat3 symmetrize(const Mat3& a) { return 0.5 * (a + a.transpose()); }

}  // namespace rino
