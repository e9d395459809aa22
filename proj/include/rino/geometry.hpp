#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace rino {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

/// Rodrigues formula, exact for all angles.
inline Mat3 so3_exp(const Vec3& phi) {
  const double theta = phi.norm();
  if (theta < 1e-10) {
    const Mat3 w = skew(phi);
    return Mat3::Identity() + w + 0.5 * w * w;
  }
  const Vec3 a = phi / theta;
  const Mat3 w = skew(a);
  return Mat3::Identity() + std::sin(theta) * w + (1.0 - std::cos(theta)) * w * w;
}

inline Vec3 so3_log(const Mat3& r) {
  const double tr = r.trace();
  const double cos_theta = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  Vec3 w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (theta < 1e-8) {
    return 0.5 * w;
  }
  if (theta > M_PI - 1e-6) {
    // near pi: extract axis from the symmetric part
    Mat3 s = 0.5 * (r + Mat3::Identity());
    Vec3 axis(std::sqrt(std::max(s(0, 0), 0.0)), std::sqrt(std::max(s(1, 1), 0.0)),
              std::sqrt(std::max(s(2, 2), 0.0)));
    if (w.x() < 0) axis.x() = -axis.x();
    if (w.y() < 0) axis.y() = -axis.y();
    if (w.z() < 0) axis.z() = -axis.z();
    if (axis.norm() > 1e-12) axis.normalize();
    return theta * axis;
  }
  return theta / (2.0 * std::sin(theta)) * w;
}

/// Right Jacobian of SO(3): Exp(phi + dphi) ~= Exp(phi) Exp(Jr(phi) dphi).
inline Mat3 so3_right_jacobian(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 w = skew(phi);
  if (theta < 1e-7) {
    return Mat3::Identity() - 0.5 * w + (1.0 / 6.0) * w * w;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() - (1.0 - std::cos(theta)) / t2 * w +
         (theta - std::sin(theta)) / (t2 * theta) * w * w;
}

inline Mat3 so3_right_jacobian_inverse(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 w = skew(phi);
  if (theta < 1e-7) {
    return Mat3::Identity() + 0.5 * w + (1.0 / 12.0) * w * w;
  }
  return Mat3::Identity() + 0.5 * w +
         (1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta))) * w * w;
}

inline Mat3 rot_z(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

/// Yaw-pitch-roll (ZYX) composition.
inline Mat3 rot_zyx(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

inline double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / M_PI; }

}  // namespace rino
