#pragma once

#include "rino/radar_model.hpp"
#include "rino/trajectory.hpp"

#include <cstdint>
#include <vector>

namespace rino {

struct ImuRecord {
  double t = 0.0;
  Vec3 angular_rate = Vec3::Zero();   // rad/s
  Vec3 specific_force = Vec3::Zero(); // m/s^2
};

struct BaroRecord {
  double t = 0.0;
  double pressure_pa = 0.0;
};

struct TruthRecord {
  double t = 0.0;
  Mat3 attitude = Mat3::Identity();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct RigSpec {
  double imu_rate_hz = 200.0;
  double radar_rate_hz = 10.0;
  double baro_rate_hz = 50.0;

  Mat3 radar_rotation = Mat3::Identity();  // R_R^B
  Vec3 radar_lever_arm = Vec3::Zero();     // l_BR^B, m

  // continuous-time densities (Table 4 units)
  double gyro_noise_density = 5.4380545102010436e-05;   // rad/s/sqrt(Hz)
  double accel_noise_density = 1.3886655606357616e-3;   // m/s^2/sqrt(Hz)
  double gyro_bias_rw_density = 1.6587925152480572e-06; // rad/s*sqrt(Hz)
  double accel_bias_rw_density = 8.538212723310593e-05; // m/s^2*sqrt(Hz)

  double baro_std_m = 0.05;
  double baro_bias_drift_m_per_sqrt_s = 0.0;

  bool imu_noise_enabled = false;  // default off: oracles stay exact
  bool baro_noise_enabled = false;
};

struct Environment {
  std::vector<Vec3> targets;  // static scatterers, world frame
  int max_points_per_scan = 64;
  double fov_azimuth_deg = 60.0;
  double fov_elevation_deg = 60.0;
  double min_range_m = 0.1;
  double max_range_m = 1e9;  // clamped to the chirp config's max range
  double dropout_probability = 0.0;
};

struct SimDataset {
  std::vector<ImuRecord> imu;
  std::vector<RadarScan> radar;
  std::vector<BaroRecord> baro;
  std::vector<TruthRecord> truth;  // at IMU rate
};

inline constexpr double kGravityMps2 = 9.81;
inline const Vec3 kGravity{0.0, 0.0, -kGravityMps2};

std::vector<ImuRecord> synth_imu(const TrajectorySpec& traj, const RigSpec& rig,
                                 std::uint64_t seed);

RadarScan synth_radar_scan(const TrajectorySample& truth, double t, const Environment& env,
                           const ChirpConfig& cfg, const RigSpec& rig, std::uint64_t seed);

std::vector<BaroRecord> synth_baro(const TrajectorySpec& traj, const RigSpec& rig,
                                   std::uint64_t seed);

SimDataset synth_dataset(const TrajectorySpec& traj, const Environment& env,
                         const ChirpConfig& cfg, const RigSpec& rig, std::uint64_t seed);

/// Uniformly scattered targets in a box around the trajectory, deterministic.
std::vector<Vec3> scatter_targets(int count, const Vec3& box_min, const Vec3& box_max,
                                  std::uint64_t seed);

}  // namespace rino
