#include "rino/synth_config.hpp"

#include "rino/geometry.hpp"

#include <yaml-cpp/yaml.h>

#include <stdexcept>

namespace rino {

namespace {

Vec3 vec3_node(const YAML::Node& n) {
  if (!n.IsSequence() || n.size() != 3) throw std::invalid_argument("expected 3-vector");
  return Vec3(n[0].as<double>(), n[1].as<double>(), n[2].as<double>());
}

double num(const YAML::Node& n, const char* name, double fallback) {
  return n[name] ? n[name].as<double>() : fallback;
}

}  // namespace

SynthConfig load_synth_config(const std::string& path) {
  const YAML::Node root = YAML::LoadFile(path);
  SynthConfig cfg;

  if (const YAML::Node t = root["trajectory"]) {
    if (t["kind"]) cfg.trajectory.kind = trajectory_kind_from_string(t["kind"].as<std::string>());
    cfg.trajectory.speed_mps = num(t, "speed_mps", cfg.trajectory.speed_mps);
    cfg.trajectory.duration_s = num(t, "duration_s", cfg.trajectory.duration_s);
    cfg.trajectory.ramp_time_s = num(t, "ramp_time_s", cfg.trajectory.ramp_time_s);
    cfg.trajectory.rest_time_s = num(t, "rest_time_s", cfg.trajectory.rest_time_s);
    cfg.trajectory.helix_radius_m = num(t, "helix_radius_m", cfg.trajectory.helix_radius_m);
    cfg.trajectory.helix_pitch_m_per_turn =
        num(t, "helix_pitch_m_per_turn", cfg.trajectory.helix_pitch_m_per_turn);
    cfg.trajectory.side_x_m = num(t, "side_x_m", cfg.trajectory.side_x_m);
    cfg.trajectory.side_y_m = num(t, "side_y_m", cfg.trajectory.side_y_m);
    cfg.trajectory.corner_radius_m = num(t, "corner_radius_m", cfg.trajectory.corner_radius_m);
    cfg.trajectory.lemniscate_x_m = num(t, "lemniscate_x_m", cfg.trajectory.lemniscate_x_m);
    cfg.trajectory.lemniscate_y_m = num(t, "lemniscate_y_m", cfg.trajectory.lemniscate_y_m);
    if (t["yaw_mode"]) {
      const std::string mode = t["yaw_mode"].as<std::string>();
      if (mode == "aligned") {
        cfg.trajectory.yaw_mode = YawMode::kAligned;
      } else if (mode == "constant") {
        cfg.trajectory.yaw_mode = YawMode::kConstant;
      } else {
        throw std::invalid_argument("unknown yaw_mode '" + mode + "'");
      }
    }
    cfg.trajectory.constant_yaw_rad = deg2rad(num(t, "constant_yaw_deg", 0.0));
  }

  if (const YAML::Node c = root["chirp"]) {
    if (c.IsScalar()) {
      cfg.chirp = chirp_preset(c.as<std::string>());
    } else if (c["preset"]) {
      cfg.chirp = chirp_preset(c["preset"].as<std::string>());
    }
  }

  if (const YAML::Node e = root["environment"]) {
    cfg.environment.max_points_per_scan =
        e["max_points_per_scan"] ? e["max_points_per_scan"].as<int>()
                                 : cfg.environment.max_points_per_scan;
    cfg.environment.fov_azimuth_deg = num(e, "fov_azimuth_deg", cfg.environment.fov_azimuth_deg);
    cfg.environment.fov_elevation_deg =
        num(e, "fov_elevation_deg", cfg.environment.fov_elevation_deg);
    cfg.environment.min_range_m = num(e, "min_range_m", cfg.environment.min_range_m);
    cfg.environment.max_range_m = num(e, "max_range_m", cfg.environment.max_range_m);
    cfg.environment.dropout_probability =
        num(e, "dropout_probability", cfg.environment.dropout_probability);
    if (const YAML::Node targets = e["targets"]) {
      if (targets["count"]) cfg.target_count = targets["count"].as<int>();
      if (targets["box_min"]) cfg.target_box_min = vec3_node(targets["box_min"]);
      if (targets["box_max"]) cfg.target_box_max = vec3_node(targets["box_max"]);
    }
  }

  if (const YAML::Node r = root["rig"]) {
    cfg.rig.imu_rate_hz = num(r, "imu_rate_hz", cfg.rig.imu_rate_hz);
    cfg.rig.radar_rate_hz = num(r, "radar_rate_hz", cfg.rig.radar_rate_hz);
    cfg.rig.baro_rate_hz = num(r, "baro_rate_hz", cfg.rig.baro_rate_hz);
    cfg.rig.gyro_noise_density = num(r, "gyro_noise_density", cfg.rig.gyro_noise_density);
    cfg.rig.accel_noise_density = num(r, "accel_noise_density", cfg.rig.accel_noise_density);
    cfg.rig.gyro_bias_rw_density = num(r, "gyro_bias_rw_density", cfg.rig.gyro_bias_rw_density);
    cfg.rig.accel_bias_rw_density =
        num(r, "accel_bias_rw_density", cfg.rig.accel_bias_rw_density);
    cfg.rig.baro_std_m = num(r, "baro_std_m", cfg.rig.baro_std_m);
    cfg.rig.baro_bias_drift_m_per_sqrt_s =
        num(r, "baro_bias_drift_m_per_sqrt_s", cfg.rig.baro_bias_drift_m_per_sqrt_s);
    if (r["imu_noise_enabled"]) cfg.rig.imu_noise_enabled = r["imu_noise_enabled"].as<bool>();
    if (r["baro_noise_enabled"]) cfg.rig.baro_noise_enabled = r["baro_noise_enabled"].as<bool>();
    if (const YAML::Node e = r["extrinsics"]) {
      cfg.rig.radar_rotation = rot_zyx(deg2rad(num(e, "yaw_deg", 0.0)),
                                       deg2rad(num(e, "pitch_deg", 0.0)),
                                       deg2rad(num(e, "roll_deg", 0.0)));
      if (e["lever_arm"]) cfg.rig.radar_lever_arm = vec3_node(e["lever_arm"]);
    }
  }

  cfg.chirp.validate();
  return cfg;
}

SimDataset run_synth(const SynthConfig& cfg, std::uint64_t seed) {
  SynthConfig local = cfg;
  if (local.environment.targets.empty()) {
    local.environment.targets =
        scatter_targets(local.target_count, local.target_box_min, local.target_box_max, seed);
  }
  return synth_dataset(local.trajectory, local.environment, local.chirp, local.rig, seed);
}

}  // namespace rino
