#pragma once

#include "rino/factor_graph.hpp"
#include "rino/geometry.hpp"

namespace rino {

/// Time-varying platform state: attitude/position/velocity of the body in the
/// world frame plus accelerometer, gyro, and barometer biases.
struct NavState {
  Mat3 attitude = Mat3::Identity();  // R_B^I
  Vec3 position = Vec3::Zero();      // m
  Vec3 velocity = Vec3::Zero();      // m/s
  Vec3 accel_bias = Vec3::Zero();    // m/s^2
  Vec3 gyro_bias = Vec3::Zero();     // rad/s
  double baro_bias = 0.0;            // m
};

/// Radar-to-body mounting.
struct Extrinsics {
  Mat3 rotation = Mat3::Identity();  // R_R^B
  Vec3 lever_arm = Vec3::Zero();     // l_BR^B, m
};

/// 16-dof tangent ordering: [dtheta(3), dp(3), dv(3), dba(3), dbg(3), dbb(1)].
/// Attitude uses the right-multiplicative exponential retraction.
class NavStateVariable final : public Variable {
 public:
  explicit NavStateVariable(NavState state) : state_(std::move(state)) {}
  int dim() const override { return 16; }
  void retract(const Eigen::VectorXd& delta) override {
    state_.attitude = state_.attitude * so3_exp(delta.segment<3>(0));
    state_.position += delta.segment<3>(3);
    state_.velocity += delta.segment<3>(6);
    state_.accel_bias += delta.segment<3>(9);
    state_.gyro_bias += delta.segment<3>(12);
    state_.baro_bias += delta(15);
  }
  Eigen::VectorXd local(const Variable& other) const override {
    const NavState& o = static_cast<const NavStateVariable&>(other).state_;
    Eigen::VectorXd d(16);
    d.segment<3>(0) = so3_log(state_.attitude.transpose() * o.attitude);
    d.segment<3>(3) = o.position - state_.position;
    d.segment<3>(6) = o.velocity - state_.velocity;
    d.segment<3>(9) = o.accel_bias - state_.accel_bias;
    d.segment<3>(12) = o.gyro_bias - state_.gyro_bias;
    d(15) = o.baro_bias - state_.baro_bias;
    return d;
  }
  std::unique_ptr<Variable> clone() const override {
    return std::make_unique<NavStateVariable>(state_);
  }
  const NavState& state() const { return state_; }
  NavState& state() { return state_; }

 private:
  NavState state_;
};

/// 6-dof tangent ordering: [dtheta(3), dl(3)].
class ExtrinsicsVariable final : public Variable {
 public:
  explicit ExtrinsicsVariable(Extrinsics value) : value_(std::move(value)) {}
  int dim() const override { return 6; }
  void retract(const Eigen::VectorXd& delta) override {
    value_.rotation = value_.rotation * so3_exp(delta.segment<3>(0));
    value_.lever_arm += delta.segment<3>(3);
  }
  Eigen::VectorXd local(const Variable& other) const override {
    const Extrinsics& o = static_cast<const ExtrinsicsVariable&>(other).value_;
    Eigen::VectorXd d(6);
    d.segment<3>(0) = so3_log(value_.rotation.transpose() * o.rotation);
    d.segment<3>(3) = o.lever_arm - value_.lever_arm;
    return d;
  }
  std::unique_ptr<Variable> clone() const override {
    return std::make_unique<ExtrinsicsVariable>(value_);
  }
  const Extrinsics& value() const { return value_; }
  Extrinsics& value() { return value_; }

 private:
  Extrinsics value_;
};

}  // namespace rino
