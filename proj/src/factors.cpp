#include "rino/factors.hpp"

#include "rino/atmosphere.hpp"

#include <cmath>

namespace rino {

namespace {

/// Inverse lower-Cholesky whitener of a PSD matrix with a tiny jitter.
template <int N>
Eigen::Matrix<double, N, N> inverse_cholesky(const Eigen::Matrix<double, N, N>& cov) {
  Eigen::Matrix<double, N, N> jittered = cov;
  jittered.diagonal().array() += 1e-16;
  const Eigen::Matrix<double, N, N> L =
      Eigen::LLT<Eigen::Matrix<double, N, N>>(jittered).matrixL();
  return L.template triangularView<Eigen::Lower>().solve(
      Eigen::Matrix<double, N, N>::Identity());
}

}  // namespace

// ------------------------------------------------------------ NavPriorFactor

NavPriorFactor::NavPriorFactor(Key key, NavState prior,
                               const Eigen::Matrix<double, 16, 16>& sqrt_info)
    : keys_{key}, prior_(std::move(prior)), sqrt_info_(sqrt_info) {}

Eigen::Matrix<double, 16, 16> NavPriorFactor::sqrt_info_from_sigmas(double sigma_rot,
                                                                    double sigma_pos,
                                                                    double sigma_vel,
                                                                    double sigma_ba,
                                                                    double sigma_bg,
                                                                    double sigma_bb) {
  Eigen::Matrix<double, 16, 16> w = Eigen::Matrix<double, 16, 16>::Zero();
  w.block<3, 3>(0, 0) = Mat3::Identity() / sigma_rot;
  w.block<3, 3>(3, 3) = Mat3::Identity() / sigma_pos;
  w.block<3, 3>(6, 6) = Mat3::Identity() / sigma_vel;
  w.block<3, 3>(9, 9) = Mat3::Identity() / sigma_ba;
  w.block<3, 3>(12, 12) = Mat3::Identity() / sigma_bg;
  w(15, 15) = 1.0 / sigma_bb;
  return w;
}

Eigen::VectorXd NavPriorFactor::evaluate(const Values& values,
                                         std::vector<Eigen::MatrixXd>* jacobians) const {
  const NavState& x = values.as<NavStateVariable>(keys_[0]).state();
  Eigen::Matrix<double, 16, 1> e;
  const Vec3 e_rot = so3_log(prior_.attitude.transpose() * x.attitude);
  e.segment<3>(0) = e_rot;
  e.segment<3>(3) = x.position - prior_.position;
  e.segment<3>(6) = x.velocity - prior_.velocity;
  e.segment<3>(9) = x.accel_bias - prior_.accel_bias;
  e.segment<3>(12) = x.gyro_bias - prior_.gyro_bias;
  e(15) = x.baro_bias - prior_.baro_bias;
  if (jacobians) {
    jacobians->resize(1);
    Eigen::Matrix<double, 16, 16> j = Eigen::Matrix<double, 16, 16>::Identity();
    j.block<3, 3>(0, 0) = so3_right_jacobian_inverse(e_rot);
    (*jacobians)[0] = sqrt_info_ * j;
  }
  return sqrt_info_ * e;
}

// ----------------------------------------------------------------- ImuFactor

ImuFactor::ImuFactor(Key key_i, Key key_j, std::shared_ptr<const PreintegratedImu> pim,
                     const Vec3& gravity)
    : keys_{key_i, key_j}, pim_(std::move(pim)), gravity_(gravity) {
  // Permute the preintegration covariance (theta, v, p) into residual order
  // (theta, p, v) before factoring.
  Eigen::Matrix<double, 9, 9> perm = Eigen::Matrix<double, 9, 9>::Zero();
  perm.block<3, 3>(0, 0) = Mat3::Identity();
  perm.block<3, 3>(3, 6) = Mat3::Identity();
  perm.block<3, 3>(6, 3) = Mat3::Identity();
  const Eigen::Matrix<double, 9, 9> cov = perm * pim_->covariance() * perm.transpose();
  whitener_ = inverse_cholesky<9>(cov);

  const double dt = pim_->delta_time();
  const ImuNoiseParams& n = pim_->noise();
  inv_sigma_ba_ = 1.0 / (n.accel_bias_rw_density * std::sqrt(dt));
  inv_sigma_bg_ = 1.0 / (n.gyro_bias_rw_density * std::sqrt(dt));
  inv_sigma_bb_ = 1.0 / (n.baro_bias_rw_density * std::sqrt(dt));
}

Eigen::VectorXd ImuFactor::evaluate(const Values& values,
                                    std::vector<Eigen::MatrixXd>* jacobians) const {
  const NavState& xi = values.as<NavStateVariable>(keys_[0]).state();
  const NavState& xj = values.as<NavStateVariable>(keys_[1]).state();
  const double dt = pim_->delta_time();

  const Mat3 ri_t = xi.attitude.transpose();
  const Mat3 delta_r = pim_->corrected_delta_rotation(xi.gyro_bias);
  const Vec3 delta_v = pim_->corrected_delta_velocity(xi.gyro_bias, xi.accel_bias);
  const Vec3 delta_p = pim_->corrected_delta_position(xi.gyro_bias, xi.accel_bias);

  const Vec3 dp_world = xj.position - xi.position - xi.velocity * dt - 0.5 * gravity_ * dt * dt;
  const Vec3 dv_world = xj.velocity - xi.velocity - gravity_ * dt;
  const Vec3 rp = ri_t * dp_world;
  const Vec3 rv = ri_t * dv_world;

  const Vec3 e_rot = so3_log(delta_r.transpose() * ri_t * xj.attitude);
  Eigen::Matrix<double, 16, 1> e;
  e.segment<3>(0) = e_rot;
  e.segment<3>(3) = rp - delta_p;
  e.segment<3>(6) = rv - delta_v;
  e.segment<3>(9) = xj.accel_bias - xi.accel_bias;
  e.segment<3>(12) = xj.gyro_bias - xi.gyro_bias;
  e(15) = xj.baro_bias - xi.baro_bias;

  if (jacobians) {
    jacobians->assign(2, Eigen::MatrixXd::Zero(16, 16));
    Eigen::MatrixXd& ji = (*jacobians)[0];
    Eigen::MatrixXd& jj = (*jacobians)[1];
    const Mat3 jr_inv = so3_right_jacobian_inverse(e_rot);

    // e_R rows
    ji.block<3, 3>(0, 0) = -jr_inv * (xj.attitude.transpose() * xi.attitude);
    const Vec3 bias_step = pim_->d_rotation_d_gyro_bias() * (xi.gyro_bias - pim_->gyro_bias_lin());
    ji.block<3, 3>(0, 12) = -jr_inv * so3_exp(e_rot).transpose() *
                            so3_right_jacobian(bias_step) * pim_->d_rotation_d_gyro_bias();
    jj.block<3, 3>(0, 0) = jr_inv;

    // e_p rows
    ji.block<3, 3>(3, 0) = skew(rp);
    ji.block<3, 3>(3, 3) = -ri_t;
    ji.block<3, 3>(3, 6) = -ri_t * dt;
    ji.block<3, 3>(3, 9) = -pim_->d_position_d_accel_bias();
    ji.block<3, 3>(3, 12) = -pim_->d_position_d_gyro_bias();
    jj.block<3, 3>(3, 3) = ri_t;

    // e_v rows
    ji.block<3, 3>(6, 0) = skew(rv);
    ji.block<3, 3>(6, 6) = -ri_t;
    ji.block<3, 3>(6, 9) = -pim_->d_velocity_d_accel_bias();
    ji.block<3, 3>(6, 12) = -pim_->d_velocity_d_gyro_bias();
    jj.block<3, 3>(6, 6) = ri_t;

    // bias random walks
    ji.block<3, 3>(9, 9) = -Mat3::Identity();
    jj.block<3, 3>(9, 9) = Mat3::Identity();
    ji.block<3, 3>(12, 12) = -Mat3::Identity();
    jj.block<3, 3>(12, 12) = Mat3::Identity();
    ji(15, 15) = -1.0;
    jj(15, 15) = 1.0;

    Eigen::Matrix<double, 16, 16> w = Eigen::Matrix<double, 16, 16>::Zero();
    w.block<9, 9>(0, 0) = whitener_;
    w.block<3, 3>(9, 9) = Mat3::Identity() * inv_sigma_ba_;
    w.block<3, 3>(12, 12) = Mat3::Identity() * inv_sigma_bg_;
    w(15, 15) = inv_sigma_bb_;
    ji = w * ji;
    jj = w * jj;
  }

  Eigen::Matrix<double, 16, 1> ew;
  ew.segment<9>(0) = whitener_ * e.segment<9>(0);
  ew.segment<3>(9) = inv_sigma_ba_ * e.segment<3>(9);
  ew.segment<3>(12) = inv_sigma_bg_ * e.segment<3>(12);
  ew(15) = inv_sigma_bb_ * e(15);
  return ew;
}

// --------------------------------------------------------- DopplerScanFactor

DopplerScanFactor::DopplerScanFactor(Key state_key, std::optional<Key> extrinsics_key,
                                     const Extrinsics& fixed_extrinsics,
                                     std::vector<Point> points, const Vec3& avg_angular_rate,
                                     DopplerScanParams params)
    : state_key_(state_key),
      extrinsics_key_(extrinsics_key),
      fixed_extrinsics_(fixed_extrinsics),
      points_(std::move(points)),
      avg_angular_rate_(avg_angular_rate),
      params_(std::move(params)) {
  keys_.push_back(state_key_);
  if (extrinsics_key_) keys_.push_back(*extrinsics_key_);
  sigmas_.assign(points_.size(), params_.doppler_quant.std_dev);
}

Extrinsics DopplerScanFactor::current_extrinsics(const Values& values) const {
  if (extrinsics_key_) return values.as<ExtrinsicsVariable>(*extrinsics_key_).value();
  return fixed_extrinsics_;
}

void DopplerScanFactor::update_noise(const Values& values) {
  if (!params_.angle_noise_on) {
    sigmas_.assign(points_.size(), params_.doppler_quant.std_dev);
    return;
  }
  const NavState& x = values.as<NavStateVariable>(state_key_).state();
  const Extrinsics ext = current_extrinsics(values);
  const Vec3 omega = avg_angular_rate_ - x.gyro_bias;
  const Vec3 v_radar = ext.rotation.transpose() *
                       (x.attitude.transpose() * x.velocity + omega.cross(ext.lever_arm));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    std::optional<GyroTerm> gyro;
    if (params_.gyro_term_on) {
      GyroTerm g;
      g.jacobian = points_[i].bearing.mu.transpose() * ext.rotation.transpose() *
                   skew(ext.lever_arm);
      g.avg_rate_covariance = params_.avg_rate_covariance;
      gyro = g;
    }
    const double var = doppler_residual_variance(points_[i].bearing, v_radar,
                                                 params_.doppler_quant,
                                                 points_[i].bearing_cov, gyro);
    sigmas_[i] = std::sqrt(var);
  }
}

Eigen::VectorXd DopplerScanFactor::raw_residuals(const Values& values) const {
  const NavState& x = values.as<NavStateVariable>(state_key_).state();
  const Extrinsics ext = current_extrinsics(values);
  const Vec3 omega = avg_angular_rate_ - x.gyro_bias;
  const Vec3 u = x.attitude.transpose() * x.velocity + omega.cross(ext.lever_arm);
  Eigen::VectorXd e(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Vec3 a = ext.rotation * points_[i].bearing.mu;
    e(static_cast<int>(i)) = -a.dot(u) - points_[i].radial_speed;
  }
  return e;
}

Eigen::VectorXd DopplerScanFactor::evaluate(const Values& values,
                                            std::vector<Eigen::MatrixXd>* jacobians) const {
  const NavState& x = values.as<NavStateVariable>(state_key_).state();
  const Extrinsics ext = current_extrinsics(values);
  const Vec3 omega = avg_angular_rate_ - x.gyro_bias;
  const Vec3 rv = x.attitude.transpose() * x.velocity;
  const Vec3 u = rv + omega.cross(ext.lever_arm);
  const int n = static_cast<int>(points_.size());

  Eigen::VectorXd e(n);
  if (jacobians) {
    jacobians->assign(keys_.size(), Eigen::MatrixXd::Zero(n, 16));
    if (extrinsics_key_) (*jacobians)[1] = Eigen::MatrixXd::Zero(n, 6);
  }
  const Mat3 rv_skew = skew(rv);
  const Mat3 lever_skew = skew(ext.lever_arm);
  const Mat3 omega_skew = skew(omega);
  for (int i = 0; i < n; ++i) {
    const Vec3 mu = points_[i].bearing.mu;
    const Vec3 a = ext.rotation * mu;
    const double inv_sigma = 1.0 / sigmas_[i];
    e(i) = (-a.dot(u) - points_[i].radial_speed) * inv_sigma;
    if (jacobians) {
      Eigen::MatrixXd& js = (*jacobians)[0];
      js.block<1, 3>(i, 0) = -a.transpose() * rv_skew * inv_sigma;
      js.block<1, 3>(i, 6) = -a.transpose() * x.attitude.transpose() * inv_sigma;
      js.block<1, 3>(i, 12) = -a.transpose() * lever_skew * inv_sigma;
      if (extrinsics_key_) {
        Eigen::MatrixXd& je = (*jacobians)[1];
        je.block<1, 3>(i, 0) =
            -mu.transpose() * skew(ext.rotation.transpose() * u) * inv_sigma;
        je.block<1, 3>(i, 3) = -a.transpose() * omega_skew * inv_sigma;
      }
    }
  }
  return e;
}

// ---------------------------------------------------- RegistrationScanFactor

RegistrationScanFactor::RegistrationScanFactor(Key state_key, std::optional<Key> extrinsics_key,
                                               const Extrinsics& fixed_extrinsics,
                                               std::vector<Point> points,
                                               RegistrationScanParams params)
    : state_key_(state_key),
      extrinsics_key_(extrinsics_key),
      fixed_extrinsics_(fixed_extrinsics),
      points_(std::move(points)),
      params_(std::move(params)) {
  keys_.push_back(state_key_);
  if (extrinsics_key_) keys_.push_back(*extrinsics_key_);
  whiteners_.assign(points_.size(), Mat3::Identity());
}

Extrinsics RegistrationScanFactor::current_extrinsics(const Values& values) const {
  if (extrinsics_key_) return values.as<ExtrinsicsVariable>(*extrinsics_key_).value();
  return fixed_extrinsics_;
}

void RegistrationScanFactor::update_noise(const Values& values) {
  const NavState& x = values.as<NavStateVariable>(state_key_).state();
  const Extrinsics ext = current_extrinsics(values);
  const Mat3 world_from_radar = x.attitude * ext.rotation;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Mat3 cov = registration_covariance(points_[i].bearing, points_[i].range,
                                             params_.range_quant, points_[i].bearing_cov,
                                             world_from_radar, points_[i].neighborhood_cov);
    whiteners_[i] = inverse_cholesky<3>(cov);
  }
}

Eigen::VectorXd RegistrationScanFactor::evaluate(const Values& values,
                                                 std::vector<Eigen::MatrixXd>* jacobians) const {
  const NavState& x = values.as<NavStateVariable>(state_key_).state();
  const Extrinsics ext = current_extrinsics(values);
  const int n = static_cast<int>(points_.size());

  Eigen::VectorXd e(3 * n);
  if (jacobians) {
    jacobians->assign(keys_.size(), Eigen::MatrixXd::Zero(3 * n, 16));
    if (extrinsics_key_) (*jacobians)[1] = Eigen::MatrixXd::Zero(3 * n, 6);
  }
  for (int i = 0; i < n; ++i) {
    const Vec3 q = points_[i].bearing.mu * points_[i].range;  // radar frame
    const Vec3 s = ext.rotation * q + ext.lever_arm;          // body frame
    const Vec3 raw = x.attitude * s + x.position - points_[i].neighborhood_centroid;
    e.segment<3>(3 * i) = whiteners_[i] * raw;
    if (jacobians) {
      Eigen::MatrixXd& js = (*jacobians)[0];
      js.block<3, 3>(3 * i, 0) = -whiteners_[i] * x.attitude * skew(s);
      js.block<3, 3>(3 * i, 3) = whiteners_[i];
      if (extrinsics_key_) {
        Eigen::MatrixXd& je = (*jacobians)[1];
        je.block<3, 3>(3 * i, 0) = -whiteners_[i] * x.attitude * ext.rotation * skew(q);
        je.block<3, 3>(3 * i, 3) = whiteners_[i] * x.attitude;
      }
    }
  }
  return e;
}

// ---------------------------------------------------------------- BaroFactor

BaroFactor::BaroFactor(Key state_key, double pressure_pa, double sigma_m, RobustLoss loss)
    : keys_{state_key},
      measured_altitude_m_(altitude_from_pressure(pressure_pa)),
      inv_sigma_(1.0 / sigma_m),
      loss_(loss) {}

Eigen::VectorXd BaroFactor::evaluate(const Values& values,
                                     std::vector<Eigen::MatrixXd>* jacobians) const {
  const NavState& x = values.as<NavStateVariable>(keys_[0]).state();
  Eigen::VectorXd e(1);
  e(0) = (x.position.z() + x.baro_bias - measured_altitude_m_) * inv_sigma_;
  if (jacobians) {
    jacobians->assign(1, Eigen::MatrixXd::Zero(1, 16));
    (*jacobians)[0](0, 5) = inv_sigma_;   // z component of position
    (*jacobians)[0](0, 15) = inv_sigma_;  // baro bias
  }
  return e;
}

}  // namespace rino
