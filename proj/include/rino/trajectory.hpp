#pragma once

#include "rino/geometry.hpp"

#include <string>

namespace rino {

enum class TrajectoryKind { kStatic, kLine, kHelix, kRoundedRectangle, kLemniscate };

enum class YawMode { kAligned, kConstant };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kStatic;

  // helix
  double helix_radius_m = 2.0;
  double helix_pitch_m_per_turn = 0.5;

  // rounded rectangle
  double side_x_m = 8.0;
  double side_y_m = 4.0;
  double corner_radius_m = 1.0;

  // lemniscate
  double lemniscate_x_m = 6.0;
  double lemniscate_y_m = 4.0;

  double speed_mps = 1.0;
  double rest_time_s = 2.0;  // stationary hold before the ramp begins
  double ramp_time_s = 2.0;
  double duration_s = 30.0;

  YawMode yaw_mode = YawMode::kAligned;
  double constant_yaw_rad = 0.0;
};

struct TrajectorySample {
  Mat3 attitude = Mat3::Identity();  // R_B^I
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 angular_rate_body = Vec3::Zero();
};

TrajectorySample sample_trajectory(const TrajectorySpec& spec, double t);

TrajectoryKind trajectory_kind_from_string(const std::string& name);

}  // namespace rino
