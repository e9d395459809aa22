#include "rino/simulator.hpp"

#include "rino/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rino {

std::vector<ImuRecord> synth_imu(const TrajectorySpec& traj, const RigSpec& rig,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x1a2b3c4d5e6f7788ull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double dt = 1.0 / rig.imu_rate_hz;
  const double sqrt_dt = std::sqrt(dt);
  const double white_gyro = rig.gyro_noise_density * std::sqrt(rig.imu_rate_hz);
  const double white_accel = rig.accel_noise_density * std::sqrt(rig.imu_rate_hz);

  Vec3 bias_gyro = Vec3::Zero();
  Vec3 bias_accel = Vec3::Zero();

  std::vector<ImuRecord> out;
  const int n = static_cast<int>(std::floor(traj.duration_s * rig.imu_rate_hz)) + 1;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const TrajectorySample s = sample_trajectory(traj, std::min(t, traj.duration_s));
    ImuRecord rec;
    rec.t = t;
    rec.angular_rate = s.angular_rate_body + bias_gyro;
    rec.specific_force = s.attitude.transpose() * (s.acceleration - kGravity) + bias_accel;
    if (rig.imu_noise_enabled) {
      rec.angular_rate += white_gyro * Vec3(gauss(rng), gauss(rng), gauss(rng));
      rec.specific_force += white_accel * Vec3(gauss(rng), gauss(rng), gauss(rng));
      bias_gyro += rig.gyro_bias_rw_density * sqrt_dt * Vec3(gauss(rng), gauss(rng), gauss(rng));
      bias_accel += rig.accel_bias_rw_density * sqrt_dt * Vec3(gauss(rng), gauss(rng), gauss(rng));
    }
    out.push_back(rec);
  }
  return out;
}

RadarScan synth_radar_scan(const TrajectorySample& truth, double t, const Environment& env,
                           const ChirpConfig& cfg, const RigSpec& rig, std::uint64_t seed) {
  const DerivedRadarProperties props = derive_properties(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double az_limit = deg2rad(env.fov_azimuth_deg);
  const double el_limit = deg2rad(env.fov_elevation_deg);
  const double max_range = std::min(env.max_range_m, cfg.max_range_m);

  const Vec3 v_radar = rig.radar_rotation.transpose() *
                       (truth.attitude.transpose() * truth.velocity +
                        skew(truth.angular_rate_body) * rig.radar_lever_arm);

  struct Candidate {
    double range;
    RadarPoint point;
  };
  std::vector<Candidate> candidates;
  for (const Vec3& target : env.targets) {
    const Vec3 in_body = truth.attitude.transpose() * (target - truth.position);
    const Vec3 in_radar = rig.radar_rotation.transpose() * (in_body - rig.radar_lever_arm);
    const double d = in_radar.norm();
    if (d < env.min_range_m || d > max_range) continue;
    const Vec3 mu = in_radar / d;
    const double azimuth = std::atan2(mu.y(), mu.x());
    const double elevation = std::asin(std::clamp(mu.z(), -1.0, 1.0));
    if (mu.x() <= 0.0 || std::abs(azimuth) > az_limit || std::abs(elevation) > el_limit) continue;
    if (env.dropout_probability > 0.0 && unit(rng) < env.dropout_probability) continue;

    const double v_r = -mu.dot(v_radar);
    const AoaPhases w = angles_to_phases(azimuth, elevation);
    const AliasResult wrapped = alias_wrap(v_r, cfg.max_doppler_mps);

    RadarPoint p;
    p.range_m = quantize_to_bin(d, props.bin_width_range_m, props.bin_width_range_m / 2.0);
    p.radial_speed_mps = quantize_to_bin(wrapped.v_measured_mps, props.bin_width_doppler_mps, 0.0);
    p.phases.w_y = quantize_to_bin(w.w_y, props.bin_width_phase_rad, 0.0);
    p.phases.w_z = quantize_to_bin(w.w_z, props.bin_width_phase_rad, 0.0);
    p.truth_range_m = d;
    p.truth_radial_speed_mps = v_r;
    p.truth_phases = w;
    p.aliased = wrapped.aliased;
    candidates.push_back({d, p});
  }

  // Nearest targets stand in for the strongest returns.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.range < b.range; });
  RadarScan scan;
  scan.timestamp_s = t;
  const int cap = env.max_points_per_scan;
  for (const Candidate& c : candidates) {
    if (cap > 0 && static_cast<int>(scan.points.size()) >= cap) break;
    scan.points.push_back(c.point);
  }
  return scan;
}

std::vector<BaroRecord> synth_baro(const TrajectorySpec& traj, const RigSpec& rig,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double dt = 1.0 / rig.baro_rate_hz;
  double bias = 0.0;
  std::vector<BaroRecord> out;
  const int n = static_cast<int>(std::floor(traj.duration_s * rig.baro_rate_hz)) + 1;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const TrajectorySample s = sample_trajectory(traj, std::min(t, traj.duration_s));
    double h = s.position.z();
    if (rig.baro_noise_enabled) {
      bias += rig.baro_bias_drift_m_per_sqrt_s * std::sqrt(dt) * gauss(rng);
      h += bias + rig.baro_std_m * gauss(rng);
    }
    out.push_back({t, pressure_from_altitude(h)});
  }
  return out;
}

SimDataset synth_dataset(const TrajectorySpec& traj, const Environment& env,
                         const ChirpConfig& cfg, const RigSpec& rig, std::uint64_t seed) {
  SimDataset ds;
  ds.imu = synth_imu(traj, rig, seed);
  ds.baro = synth_baro(traj, rig, seed);

  ds.truth.reserve(ds.imu.size());
  for (const ImuRecord& rec : ds.imu) {
    const TrajectorySample s = sample_trajectory(traj, std::min(rec.t, traj.duration_s));
    ds.truth.push_back({rec.t, s.attitude, s.position, s.velocity});
  }

  const double dt = 1.0 / rig.radar_rate_hz;
  const int n = static_cast<int>(std::floor(traj.duration_s * rig.radar_rate_hz)) + 1;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    const TrajectorySample s = sample_trajectory(traj, std::min(t, traj.duration_s));
    ds.radar.push_back(
        synth_radar_scan(s, t, env, cfg, rig, seed ^ (0xabcdef01ull + 0x9e37ull * i)));
  }
  return ds;
}

std::vector<Vec3> scatter_targets(int count, const Vec3& box_min, const Vec3& box_max,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5ca77e7ull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      p[k] = box_min[k] + (box_max[k] - box_min[k]) * unit(rng);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace rino
