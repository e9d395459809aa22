#pragma once

#include "rino/factor_graph.hpp"
#include "rino/nav_state.hpp"
#include "rino/noise_model.hpp"
#include "rino/preintegration.hpp"

#include <memory>
#include <optional>

namespace rino {

/// Gaussian prior on a nav state. Residual ordering matches the tangent:
/// [theta, p, v, b_a, b_g, b_b], whitened by the supplied sqrt-information.
class NavPriorFactor final : public Factor {
 public:
  NavPriorFactor(Key key, NavState prior, const Eigen::Matrix<double, 16, 16>& sqrt_info);
  static Eigen::Matrix<double, 16, 16> sqrt_info_from_sigmas(
      double sigma_rot, double sigma_pos, double sigma_vel, double sigma_ba, double sigma_bg,
      double sigma_bb);

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return 16; }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  std::vector<Key> keys_;
  NavState prior_;
  Eigen::Matrix<double, 16, 16> sqrt_info_;
};

/// Preintegrated IMU constraint between consecutive nav states, including the
/// accel/gyro/baro bias random walks. Residual ordering:
/// [e_R(3), e_p(3), e_v(3), e_ba(3), e_bg(3), e_bb(1)].
class ImuFactor final : public Factor {
 public:
  ImuFactor(Key key_i, Key key_j, std::shared_ptr<const PreintegratedImu> pim,
            const Vec3& gravity);

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return 16; }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

  const PreintegratedImu& preintegrated() const { return *pim_; }

 private:
  std::vector<Key> keys_;
  std::shared_ptr<const PreintegratedImu> pim_;
  Vec3 gravity_;
  Eigen::Matrix<double, 9, 9> whitener_;  // for (e_R, e_p, e_v)
  double inv_sigma_ba_ = 0.0;
  double inv_sigma_bg_ = 0.0;
  double inv_sigma_bb_ = 0.0;
};

struct DopplerScanParams {
  QuantNoise doppler_quant;
  PhaseNoise phase_noise;
  bool angle_noise_on = true;       // state-dependent variance (vs constant)
  bool gyro_term_on = false;        // include averaged-gyro noise in variance
  Mat3 avg_rate_covariance = Mat3::Zero();
  RobustLoss loss = RobustLoss::cauchy(1.0);
};

/// One aggregated factor per radar scan: stacked whitened per-point Doppler
/// residuals with a per-point robust loss. The residual noise is
/// state-dependent; update_noise() re-evaluates it at the current estimate
/// and must be called once before use and after every accepted LM step.
class DopplerScanFactor final : public Factor {
 public:
  struct Point {
    Bearing bearing;          // from measured phases
    double radial_speed = 0;  // measured, m/s
    BearingCovariance bearing_cov;
  };

  DopplerScanFactor(Key state_key, std::optional<Key> extrinsics_key,
                    const Extrinsics& fixed_extrinsics, std::vector<Point> points,
                    const Vec3& avg_angular_rate, DopplerScanParams params);

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return static_cast<int>(points_.size()); }
  int robust_block_size() const override { return 1; }
  RobustLoss loss() const override { return params_.loss; }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

  void update_noise(const Values& values);
  const std::vector<double>& sigmas() const { return sigmas_; }
  /// Unwhitened residuals at the given values (for static-point selection).
  Eigen::VectorXd raw_residuals(const Values& values) const;

 private:
  Extrinsics current_extrinsics(const Values& values) const;

  std::vector<Key> keys_;
  Key state_key_;
  std::optional<Key> extrinsics_key_;
  Extrinsics fixed_extrinsics_;
  std::vector<Point> points_;
  Vec3 avg_angular_rate_;
  DopplerScanParams params_;
  std::vector<double> sigmas_;
};

struct RegistrationScanParams {
  QuantNoise range_quant;
  PhaseNoise phase_noise;
  RobustLoss loss = RobustLoss::none();
};

/// Aggregated point-to-neighborhood registration factor for one scan.
/// update_noise() re-evaluates the per-point covariances (which depend on the
/// estimated attitude) at the current estimate.
class RegistrationScanFactor final : public Factor {
 public:
  struct Point {
    Bearing bearing;        // from measured phases
    double range = 0.0;     // measured, m
    BearingCovariance bearing_cov;
    Vec3 neighborhood_centroid = Vec3::Zero();
    Mat3 neighborhood_cov = Mat3::Zero();
  };

  RegistrationScanFactor(Key state_key, std::optional<Key> extrinsics_key,
                         const Extrinsics& fixed_extrinsics, std::vector<Point> points,
                         RegistrationScanParams params);

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return 3 * static_cast<int>(points_.size()); }
  int robust_block_size() const override { return 3; }
  RobustLoss loss() const override { return params_.loss; }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

  void update_noise(const Values& values);

 private:
  Extrinsics current_extrinsics(const Values& values) const;

  std::vector<Key> keys_;
  Key state_key_;
  std::optional<Key> extrinsics_key_;
  Extrinsics fixed_extrinsics_;
  std::vector<Point> points_;
  RegistrationScanParams params_;
  std::vector<Mat3> whiteners_;  // inverse Cholesky factors
};

/// Barometric height factor: e = z + b_b - h(pressure), whitened; the bias
/// convention makes e invariant under (z, b_b) -> (z + c, b_b - c).
class BaroFactor final : public Factor {
 public:
  BaroFactor(Key state_key, double pressure_pa, double sigma_m,
             RobustLoss loss = RobustLoss::huber(1.345));

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return 1; }
  RobustLoss loss() const override { return loss_; }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

 private:
  std::vector<Key> keys_;
  double measured_altitude_m_;
  double inv_sigma_;
  RobustLoss loss_;
};

}  // namespace rino
