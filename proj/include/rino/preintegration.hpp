#pragma once

#include "rino/geometry.hpp"
#include "rino/simulator.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rino {

struct ImuNoiseParams {
  double gyro_noise_density = 5.4380545102010436e-05;   // rad/s/sqrt(Hz)
  double accel_noise_density = 1.3886655606357616e-3;   // m/s^2/sqrt(Hz)
  double gyro_bias_rw_density = 1.6587925152480572e-06; // rad/s*sqrt(Hz)
  double accel_bias_rw_density = 8.538212723310593e-05; // m/s^2*sqrt(Hz)
  double baro_bias_rw_density = 1e-3;                   // m*sqrt(Hz)
};

/// On-manifold preintegration of an IMU segment relative to fixed bias
/// linearization points, with first-order bias-correction Jacobians.
/// Covariance ordering: [dtheta(3), dv(3), dp(3)].
class PreintegratedImu {
 public:
  PreintegratedImu(const ImuNoiseParams& noise, const Vec3& gyro_bias, const Vec3& accel_bias);

  /// One measurement held constant over dt.
  void integrate(const Vec3& angular_rate, const Vec3& specific_force, double dt);
  /// Convenience: integrates successive records; each interval uses the
  /// earlier sample (zero-order hold). Throws on non-monotone timestamps.
  void integrate_segment(const std::vector<ImuRecord>& records);

  const Mat3& delta_rotation() const { return delta_R_; }
  const Vec3& delta_velocity() const { return delta_v_; }
  const Vec3& delta_position() const { return delta_p_; }
  double delta_time() const { return delta_t_; }
  int count() const { return count_; }
  const Eigen::Matrix<double, 9, 9>& covariance() const { return cov_; }

  const Vec3& gyro_bias_lin() const { return gyro_bias_lin_; }
  const Vec3& accel_bias_lin() const { return accel_bias_lin_; }

  /// First-order bias-corrected deltas at (gyro_bias, accel_bias).
  Mat3 corrected_delta_rotation(const Vec3& gyro_bias) const;
  Vec3 corrected_delta_velocity(const Vec3& gyro_bias, const Vec3& accel_bias) const;
  Vec3 corrected_delta_position(const Vec3& gyro_bias, const Vec3& accel_bias) const;

  const Mat3& d_rotation_d_gyro_bias() const { return dR_dbg_; }
  const Mat3& d_velocity_d_gyro_bias() const { return dv_dbg_; }
  const Mat3& d_velocity_d_accel_bias() const { return dv_dba_; }
  const Mat3& d_position_d_gyro_bias() const { return dp_dbg_; }
  const Mat3& d_position_d_accel_bias() const { return dp_dba_; }

  /// True when the first-order correction is no longer trustworthy and the
  /// integral should be recomputed at the new bias estimate.
  bool bias_drift_exceeds(const Vec3& gyro_bias, const Vec3& accel_bias,
                          double threshold = 1e-2) const;

  const ImuNoiseParams& noise() const { return noise_; }

 private:
  ImuNoiseParams noise_;
  Vec3 gyro_bias_lin_;
  Vec3 accel_bias_lin_;

  Mat3 delta_R_ = Mat3::Identity();
  Vec3 delta_v_ = Vec3::Zero();
  Vec3 delta_p_ = Vec3::Zero();
  double delta_t_ = 0.0;
  int count_ = 0;
  Eigen::Matrix<double, 9, 9> cov_ = Eigen::Matrix<double, 9, 9>::Zero();

  Mat3 dR_dbg_ = Mat3::Zero();
  Mat3 dv_dbg_ = Mat3::Zero();
  Mat3 dv_dba_ = Mat3::Zero();
  Mat3 dp_dbg_ = Mat3::Zero();
  Mat3 dp_dba_ = Mat3::Zero();

  double last_t_ = 0.0;
  bool have_last_ = false;
  Vec3 last_rate_ = Vec3::Zero();
  Vec3 last_force_ = Vec3::Zero();
};

}  // namespace rino
