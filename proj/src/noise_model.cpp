#include "rino/noise_model.hpp"

#include <random>
#include <stdexcept>

namespace rino {

RadarNoise RadarNoise::from_config(const ChirpConfig& cfg) {
  const DerivedRadarProperties props = derive_properties(cfg);
  RadarNoise n;
  n.range = QuantNoise::from_bin_width(props.bin_width_range_m);
  n.doppler = QuantNoise::from_bin_width(props.bin_width_doppler_mps);
  n.phase = PhaseNoise::from_bin_width(props.bin_width_phase_rad);
  return n;
}

Eigen::Matrix<double, 3, 2> bearing_jacobian(const AoaPhases& w) {
  const double arg = 1.0 - (w.w_y * w.w_y + w.w_z * w.w_z) / (M_PI * M_PI);
  if (arg < 1e-6) {
    throw std::domain_error("bearing jacobian near-singular; filter edge-of-FOV points");
  }
  const double root = std::sqrt(arg);
  Eigen::Matrix<double, 3, 2> j;
  j(0, 0) = -w.w_y / (M_PI * M_PI * root);
  j(0, 1) = -w.w_z / (M_PI * M_PI * root);
  j(1, 0) = 1.0 / M_PI;
  j(1, 1) = 0.0;
  j(2, 0) = 0.0;
  j(2, 1) = 1.0 / M_PI;
  return j;
}

BearingCovariance bearing_covariance(const AoaPhases& w, const PhaseNoise& pn) {
  const Eigen::Matrix<double, 3, 2> j = bearing_jacobian(w);
  BearingCovariance out;
  out.sigma_mu = symmetrize(j * pn.covariance() * j.transpose());
  return out;
}

double doppler_residual_variance(const Bearing& mu_meas, const Vec3& v_radar_est,
                                 const QuantNoise& doppler_quant,
                                 const BearingCovariance& sigma_mu,
                                 const std::optional<GyroTerm>& gyro) {
  if (!mu_meas.mu.allFinite() || !v_radar_est.allFinite()) {
    throw std::invalid_argument("non-finite input to doppler_residual_variance");
  }
  double var = doppler_quant.variance() + v_radar_est.dot(sigma_mu.sigma_mu * v_radar_est);
  if (gyro) {
    var += (gyro->jacobian * gyro->avg_rate_covariance * gyro->jacobian.transpose())(0, 0);
  }
  return var;
}

Mat3 registration_covariance(const Bearing& mu_meas, double range_meas,
                             const QuantNoise& range_quant, const BearingCovariance& sigma_mu,
                             const Mat3& rotation_world_radar, const Mat3& sigma_q) {
  const Mat3 point_cov = range_quant.variance() * mu_meas.mu * mu_meas.mu.transpose() +
                         range_meas * range_meas * sigma_mu.sigma_mu;
  return symmetrize(rotation_world_radar * point_cov * rotation_world_radar.transpose() + sigma_q);
}

McStatistics mc_measurement_oracle(const ChirpConfig& cfg, const McScenario& scenario) {
  const DerivedRadarProperties props = derive_properties(cfg);
  std::mt19937_64 rng(scenario.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);

  const AoaPhases w0 =
      angles_to_phases(scenario.true_azimuth_rad, scenario.true_elevation_rad);

  // Welford accumulators per channel.
  struct Acc {
    double mean = 0.0, m2 = 0.0;
    std::int64_t n = 0;
    void add(double x) {
      ++n;
      const double d = x - mean;
      mean += d / n;
      m2 += d * (x - mean);
    }
    double std_dev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
  };
  Acc range_acc, doppler_acc, wy_acc, wz_acc;

  for (std::int64_t i = 0; i < scenario.samples; ++i) {
    // The true value drifts uniformly within one bin; the sensor reports the
    // nearest bin center.
    const double d_true = scenario.true_range_m + unit(rng) * props.bin_width_range_m;
    const double v_true = scenario.true_radial_speed_mps + unit(rng) * props.bin_width_doppler_mps;
    const double wy_true = w0.w_y + unit(rng) * props.bin_width_phase_rad;
    const double wz_true = w0.w_z + unit(rng) * props.bin_width_phase_rad;

    range_acc.add(quantize_to_bin(d_true, props.bin_width_range_m, props.bin_width_range_m / 2.0) -
                  d_true);
    doppler_acc.add(quantize_to_bin(v_true, props.bin_width_doppler_mps, 0.0) - v_true);
    wy_acc.add(quantize_to_bin(wy_true, props.bin_width_phase_rad, 0.0) - wy_true);
    wz_acc.add(quantize_to_bin(wz_true, props.bin_width_phase_rad, 0.0) - wz_true);
  }

  McStatistics out;
  out.range_error_mean = range_acc.mean;
  out.range_error_std = range_acc.std_dev();
  out.doppler_error_mean = doppler_acc.mean;
  out.doppler_error_std = doppler_acc.std_dev();
  out.phase_y_error_mean = wy_acc.mean;
  out.phase_y_error_std = wy_acc.std_dev();
  out.phase_z_error_mean = wz_acc.mean;
  out.phase_z_error_std = wz_acc.std_dev();
  return out;
}

}  // namespace rino
