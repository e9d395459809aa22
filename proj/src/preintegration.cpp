#include "rino/preintegration.hpp"

#include <stdexcept>

namespace rino {

PreintegratedImu::PreintegratedImu(const ImuNoiseParams& noise, const Vec3& gyro_bias,
                                   const Vec3& accel_bias)
    : noise_(noise), gyro_bias_lin_(gyro_bias), accel_bias_lin_(accel_bias) {}

void PreintegratedImu::integrate(const Vec3& angular_rate, const Vec3& specific_force,
                                 double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("non-positive IMU interval");
  const Vec3 w = angular_rate - gyro_bias_lin_;
  const Vec3 f = specific_force - accel_bias_lin_;
  const Mat3 incr = so3_exp(w * dt);
  const Mat3 jr = so3_right_jacobian(w * dt);
  const Mat3 f_skew = skew(f);

  // State transition for [dtheta, dv, dp] and noise input Jacobians.
  Eigen::Matrix<double, 9, 9> A = Eigen::Matrix<double, 9, 9>::Identity();
  A.block<3, 3>(0, 0) = incr.transpose();
  A.block<3, 3>(3, 0) = -delta_R_ * f_skew * dt;
  A.block<3, 3>(6, 0) = -0.5 * delta_R_ * f_skew * dt * dt;
  A.block<3, 3>(6, 3) = Mat3::Identity() * dt;

  Eigen::Matrix<double, 9, 3> Bg = Eigen::Matrix<double, 9, 3>::Zero();
  Bg.block<3, 3>(0, 0) = jr * dt;
  Eigen::Matrix<double, 9, 3> Ba = Eigen::Matrix<double, 9, 3>::Zero();
  Ba.block<3, 3>(3, 0) = delta_R_ * dt;
  Ba.block<3, 3>(6, 0) = 0.5 * delta_R_ * dt * dt;

  const double var_g = noise_.gyro_noise_density * noise_.gyro_noise_density / dt;
  const double var_a = noise_.accel_noise_density * noise_.accel_noise_density / dt;
  cov_ = A * cov_ * A.transpose() + var_g * Bg * Bg.transpose() + var_a * Ba * Ba.transpose();

  // Bias-correction Jacobians; position/velocity rows use pre-update values.
  dp_dba_ += dv_dba_ * dt - 0.5 * delta_R_ * dt * dt;
  dp_dbg_ += dv_dbg_ * dt - 0.5 * delta_R_ * f_skew * dR_dbg_ * dt * dt;
  dv_dba_ += -delta_R_ * dt;
  dv_dbg_ += -delta_R_ * f_skew * dR_dbg_ * dt;
  dR_dbg_ = incr.transpose() * dR_dbg_ - jr * dt;

  delta_p_ += delta_v_ * dt + 0.5 * delta_R_ * f * dt * dt;
  delta_v_ += delta_R_ * f * dt;
  delta_R_ = delta_R_ * incr;
  delta_t_ += dt;
  ++count_;
}

void PreintegratedImu::integrate_segment(const std::vector<ImuRecord>& records) {
  for (const ImuRecord& r : records) {
    if (have_last_) {
      const double dt = r.t - last_t_;
      if (!(dt > 0.0)) throw std::invalid_argument("non-monotone IMU timestamps");
      integrate(0.5 * (last_rate_ + r.angular_rate),
                0.5 * (last_force_ + r.specific_force), dt);
    }
    last_t_ = r.t;
    last_rate_ = r.angular_rate;
    last_force_ = r.specific_force;
    have_last_ = true;
  }
}

Mat3 PreintegratedImu::corrected_delta_rotation(const Vec3& gyro_bias) const {
  return delta_R_ * so3_exp(dR_dbg_ * (gyro_bias - gyro_bias_lin_));
}

Vec3 PreintegratedImu::corrected_delta_velocity(const Vec3& gyro_bias,
                                                const Vec3& accel_bias) const {
  return delta_v_ + dv_dbg_ * (gyro_bias - gyro_bias_lin_) +
         dv_dba_ * (accel_bias - accel_bias_lin_);
}

Vec3 PreintegratedImu::corrected_delta_position(const Vec3& gyro_bias,
                                                const Vec3& accel_bias) const {
  return delta_p_ + dp_dbg_ * (gyro_bias - gyro_bias_lin_) +
         dp_dba_ * (accel_bias - accel_bias_lin_);
}

bool PreintegratedImu::bias_drift_exceeds(const Vec3& gyro_bias, const Vec3& accel_bias,
                                          double threshold) const {
  return (gyro_bias - gyro_bias_lin_).norm() > threshold ||
         (accel_bias - accel_bias_lin_).norm() > 10.0 * threshold;
}

}  // namespace rino
