#include "rino/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rino {

namespace {

// Curve value and first two parameter derivatives.
struct CurvePoint {
  Vec3 p = Vec3::Zero();
  Vec3 d1 = Vec3::Zero();
  Vec3 d2 = Vec3::Zero();
};

CurvePoint eval_line(double u) {
  CurvePoint c;
  c.p = Vec3(u, 0.0, 0.0);
  c.d1 = Vec3::UnitX();
  return c;
}

CurvePoint eval_helix(const TrajectorySpec& s, double u) {
  const double climb = s.helix_pitch_m_per_turn / (2.0 * M_PI);
  const double k = std::sqrt(s.helix_radius_m * s.helix_radius_m + climb * climb);
  const double a = u / k;
  CurvePoint c;
  c.p = Vec3(s.helix_radius_m * (std::cos(a) - 1.0), s.helix_radius_m * std::sin(a), climb * a);
  c.d1 = Vec3(-s.helix_radius_m * std::sin(a), s.helix_radius_m * std::cos(a), climb) / k;
  c.d2 = Vec3(-s.helix_radius_m * std::cos(a), -s.helix_radius_m * std::sin(a), 0.0) / (k * k);
  return c;
}

CurvePoint eval_lemniscate(const TrajectorySpec& s, double u) {
  CurvePoint c;
  c.p = Vec3(s.lemniscate_x_m * std::sin(u), 0.5 * s.lemniscate_y_m * std::sin(2.0 * u), 0.0);
  c.d1 = Vec3(s.lemniscate_x_m * std::cos(u), s.lemniscate_y_m * std::cos(2.0 * u), 0.0);
  c.d2 = Vec3(-s.lemniscate_x_m * std::sin(u), -2.0 * s.lemniscate_y_m * std::sin(2.0 * u), 0.0);
  return c;
}

// Arc-length parametrized: straights and quarter-circle corners, CCW.
CurvePoint eval_rounded_rectangle(const TrajectorySpec& s, double u) {
  const double lx = s.side_x_m - 2.0 * s.corner_radius_m;
  const double ly = s.side_y_m - 2.0 * s.corner_radius_m;
  if (lx <= 0.0 || ly <= 0.0) {
    throw std::invalid_argument("corner radius too large for rectangle sides");
  }
  const double rc = s.corner_radius_m;
  const double quarter = 0.5 * M_PI * rc;
  const double perimeter = 2.0 * (lx + ly) + 4.0 * quarter;
  double q = std::fmod(u, perimeter);
  if (q < 0.0) q += perimeter;

  // Segment sequence starting at the middle of the +x-heading bottom side.
  const double hx = 0.5 * lx, hy = 0.5 * ly + rc;
  CurvePoint c;
  struct Piece {
    double len;
    int type;  // 0 straight, 1 arc
    Vec3 p0;
    Vec3 dir;
    Vec3 center;
    double a0;
  };
  const Piece pieces[] = {
      {hx, 0, Vec3(0.0, -hy, 0.0), Vec3::UnitX(), Vec3::Zero(), 0.0},
      {quarter, 1, Vec3(), Vec3(), Vec3(hx, -hy + rc, 0.0), -M_PI / 2},
      {ly, 0, Vec3(hx + rc, -hy + rc, 0.0), Vec3::UnitY(), Vec3::Zero(), 0.0},
      {quarter, 1, Vec3(), Vec3(), Vec3(hx, hy - rc, 0.0), 0.0},
      {lx, 0, Vec3(hx, hy, 0.0), -Vec3::UnitX(), Vec3::Zero(), 0.0},
      {quarter, 1, Vec3(), Vec3(), Vec3(-hx, hy - rc, 0.0), M_PI / 2},
      {ly, 0, Vec3(-hx - rc, hy - rc, 0.0), -Vec3::UnitY(), Vec3::Zero(), 0.0},
      {quarter, 1, Vec3(), Vec3(), Vec3(-hx, -hy + rc, 0.0), M_PI},
      {hx, 0, Vec3(-hx, -hy, 0.0), Vec3::UnitX(), Vec3::Zero(), 0.0},
  };
  for (const Piece& piece : pieces) {
    if (q <= piece.len + 1e-12) {
      if (piece.type == 0) {
        c.p = piece.p0 + piece.dir * q;
        c.d1 = piece.dir;
        c.d2 = Vec3::Zero();
      } else {
        const double a = piece.a0 + q / rc;
        c.p = piece.center + rc * Vec3(std::cos(a), std::sin(a), 0.0);
        c.d1 = Vec3(-std::sin(a), std::cos(a), 0.0);
        c.d2 = Vec3(-std::cos(a), -std::sin(a), 0.0) / rc;
      }
      return c;
    }
    q -= piece.len;
  }
  // numerically at the wrap point
  c.p = Vec3(0.0, -hy, 0.0);
  c.d1 = Vec3::UnitX();
  return c;
}

CurvePoint eval_curve(const TrajectorySpec& s, double u) {
  switch (s.kind) {
    case TrajectoryKind::kLine:
      return eval_line(u);
    case TrajectoryKind::kHelix:
      return eval_helix(s, u);
    case TrajectoryKind::kLemniscate:
      return eval_lemniscate(s, u);
    case TrajectoryKind::kRoundedRectangle:
      return eval_rounded_rectangle(s, u);
    case TrajectoryKind::kStatic:
      return CurvePoint{};
  }
  return CurvePoint{};
}

// Peak parameter-derivative magnitude, for scaling the parameter rate so the
// commanded speed is the peak ground speed.
double max_curve_speed(const TrajectorySpec& s) {
  if (s.kind != TrajectoryKind::kLemniscate) return 1.0;  // arc-length parametrized
  double best = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    best = std::max(best, eval_lemniscate(s, 2.0 * M_PI * i / 1000.0).d1.norm());
  }
  return best;
}

// Smooth-step ramp integral: r(t) in [0,1], int_0^t r.
void ramp(double t, double ramp_time, double& r, double& r_dot, double& r_int) {
  if (ramp_time <= 0.0 || t >= ramp_time) {
    r = 1.0;
    r_dot = 0.0;
    r_int = (ramp_time > 0.0 ? 0.5 * ramp_time : 0.0) + (t - std::max(ramp_time, 0.0));
    return;
  }
  const double x = t / ramp_time;
  r = x * x * (3.0 - 2.0 * x);
  r_dot = 6.0 * x * (1.0 - x) / ramp_time;
  r_int = ramp_time * (x * x * x - 0.5 * x * x * x * x);
}

}  // namespace

TrajectorySample sample_trajectory(const TrajectorySpec& spec, double t) {
  if (t < 0.0 || t > spec.duration_s) {
    throw std::invalid_argument("sample time outside trajectory duration");
  }
  if (spec.speed_mps < 0.0) {
    throw std::invalid_argument("trajectory speed must be non-negative");
  }
  TrajectorySample out;
  if (spec.kind == TrajectoryKind::kStatic || spec.speed_mps == 0.0) {
    out.attitude = rot_z(spec.yaw_mode == YawMode::kConstant ? spec.constant_yaw_rad : 0.0);
    return out;
  }

  const double rate = spec.speed_mps / max_curve_speed(spec);
  double r = 0.0, r_dot = 0.0, r_int = 0.0;
  ramp(std::max(0.0, t - spec.rest_time_s), spec.ramp_time_s, r, r_dot, r_int);
  const double u = rate * r_int;
  const double u_dot = rate * r;
  const double u_ddot = rate * r_dot;

  const CurvePoint c = eval_curve(spec, u);
  out.position = c.p;
  out.velocity = c.d1 * u_dot;
  out.acceleration = c.d2 * u_dot * u_dot + c.d1 * u_ddot;

  double yaw = spec.constant_yaw_rad;
  double yaw_rate = 0.0;
  if (spec.yaw_mode == YawMode::kAligned) {
    const double tx = c.d1.x(), ty = c.d1.y();
    const double planar2 = tx * tx + ty * ty;
    if (planar2 < 1e-12) {
      throw std::invalid_argument("yaw-aligned mode undefined at zero planar speed");
    }
    yaw = std::atan2(ty, tx);
    yaw_rate = (tx * c.d2.y() - c.d2.x() * ty) / planar2 * u_dot;
  }
  out.attitude = rot_z(yaw);
  out.angular_rate_body = Vec3(0.0, 0.0, yaw_rate);
  return out;
}

TrajectoryKind trajectory_kind_from_string(const std::string& name) {
  if (name == "static") return TrajectoryKind::kStatic;
  if (name == "line") return TrajectoryKind::kLine;
  if (name == "helix") return TrajectoryKind::kHelix;
  if (name == "rounded_rectangle") return TrajectoryKind::kRoundedRectangle;
  if (name == "lemniscate") return TrajectoryKind::kLemniscate;
  throw std::invalid_argument("unknown trajectory kind '" + name + "'");
}

}  // namespace rino
