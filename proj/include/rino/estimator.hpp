#pragma once

#include "rino/factors.hpp"
#include "rino/mapping.hpp"
#include "rino/simulator.hpp"

#include <deque>
#include <map>
#include <string>
#include <vector>

namespace rino {

struct EstimatorConfig {
  // radar measurement noise (quantization-derived)
  ChirpConfig chirp = chirp_preset("rc1");

  ImuNoiseParams imu_noise;
  double baro_sigma_m = 0.05;

  double lag_s = 2.0;
  int lm_iterations = 5;
  double kappa_static = 3.0;
  double cauchy_scale = 1.0;
  double huber_scale = 1.345;

  // feature flags
  bool angle_noise_on = true;      // state-dependent Doppler variance ("noise")
  bool registration_on = true;     // map registration factors ("geometry")
  bool baro_on = true;
  bool gyro_term_on = false;
  bool estimate_extrinsics = false;

  Extrinsics extrinsics;

  // mapping
  double map_voxel_m = 0.5;
  double map_radius_m = 1.0;
  int map_min_neighbors = 5;

  // initialization
  double init_duration_s = 1.0;
  double init_motion_gyro_threshold = 0.05;   // rad/s std
  double init_motion_accel_threshold = 0.5;   // m/s^2 std

  // initial prior standard deviations
  double prior_sigma_rot = 0.02;
  double prior_sigma_pos = 1e-4;
  double prior_sigma_vel = 1e-3;
  double prior_sigma_ba = 0.05;
  double prior_sigma_bg = 1e-3;
  double prior_sigma_bb = 0.5;
};

EstimatorConfig load_estimator_config(const std::string& path);

struct StampedPose {
  double t = 0.0;
  Mat3 attitude = Mat3::Identity();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct InitializationResult {
  NavState state;
  Eigen::Matrix<double, 16, 16> prior_sqrt_info;
};

/// At-rest initialization: gyro bias from the mean rate, roll/pitch from the
/// mean specific-force direction, yaw zero. Throws std::runtime_error when
/// the buffer variance indicates motion.
InitializationResult initialize_at_rest(const std::vector<ImuRecord>& buffer,
                                        const EstimatorConfig& cfg);

/// Dead-reckoning from a nav state through raw IMU records.
std::vector<StampedPose> propagate_high_rate(const NavState& state, double t0,
                                             const std::vector<ImuRecord>& imu,
                                             const Vec3& gravity = kGravity);

/// Fixed-lag smoother fusing preintegrated IMU, per-scan Doppler factors,
/// map-registration factors, and barometric height.
class Estimator {
 public:
  explicit Estimator(EstimatorConfig cfg);

  void add_imu(const ImuRecord& rec);
  void add_baro(const BaroRecord& rec);
  /// Processes one radar scan: node creation, factor assembly, optimization,
  /// map update, marginalization. Returns the optimized newest state, or
  /// nullopt while still initializing.
  std::optional<StampedPose> add_radar(const RadarScan& scan);

  bool initialized() const { return initialized_; }
  const NavState& current_state() const;
  double current_time() const { return last_node_time_; }
  const PointMap& map() const { return map_; }
  const EstimatorConfig& config() const { return cfg_; }
  Extrinsics current_extrinsics() const;

  /// High-rate odometry since the newest node, re-integrated from the latest
  /// optimized state.
  std::vector<StampedPose> high_rate_since_last_node() const;

  /// Marginal covariance of the newest node (16x16, tangent ordering).
  Eigen::MatrixXd latest_covariance() const;

  int window_size() const { return static_cast<int>(node_keys_.size()); }

 private:
  struct Edge {
    Key from = 0, to = 0;
    std::vector<ImuRecord> segment;
    std::shared_ptr<ImuFactor> factor;
    std::shared_ptr<const PreintegratedImu> pim;
  };

  void try_initialize(double scan_time);
  std::vector<ImuRecord> take_imu_segment(double t_begin, double t_end);
  ImuRecord interpolate_imu(double t) const;
  void rebuild_drifted_preintegrations();
  void refresh_scan_noise();
  void process_scan(const RadarScan& scan);

  EstimatorConfig cfg_;
  RadarNoise radar_noise_;

  FactorGraph graph_;
  std::vector<Key> node_keys_;
  std::map<Key, double> node_times_;
  std::vector<Edge> edges_;
  std::vector<std::shared_ptr<DopplerScanFactor>> doppler_factors_;
  std::vector<std::shared_ptr<RegistrationScanFactor>> registration_factors_;

  PointMap map_;

  std::deque<ImuRecord> imu_buffer_;
  std::deque<BaroRecord> baro_buffer_;
  std::vector<ImuRecord> init_buffer_;

  bool initialized_ = false;
  Key next_key_ = 0;
  double last_node_time_ = 0.0;
  Key extrinsics_key_ = 0;
};

}  // namespace rino
