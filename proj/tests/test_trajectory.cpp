#include "rino/trajectory.hpp"

#include <doctest.h>

#include <cmath>

using namespace rino;

namespace {

// Central finite differences of position/attitude against the analytic
// derivatives, away from the rest/ramp transition.
void check_derivatives(const TrajectorySpec& spec, double t, double tol) {
  const double h = 1e-5;
  const TrajectorySample s = sample_trajectory(spec, t);
  const TrajectorySample sm = sample_trajectory(spec, t - h);
  const TrajectorySample sp = sample_trajectory(spec, t + h);

  const Vec3 v_fd = (sp.position - sm.position) / (2.0 * h);
  const Vec3 a_fd = (sp.velocity - sm.velocity) / (2.0 * h);
  const Vec3 w_fd = so3_log(sm.attitude.transpose() * sp.attitude) / (2.0 * h);

  const double vs = std::max(1.0, s.velocity.norm());
  const double as = std::max(1.0, s.acceleration.norm());
  CHECK((s.velocity - v_fd).norm() <= tol * vs);
  CHECK((s.acceleration - a_fd).norm() <= 100.0 * tol * as);
  CHECK((s.angular_rate_body - w_fd).norm() <= 100.0 * tol);
}

}  // namespace

TEST_CASE("static trajectory") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kStatic;
  spec.duration_s = 10.0;
  spec.yaw_mode = YawMode::kConstant;
  for (double t : {0.0, 3.3, 10.0}) {
    const TrajectorySample s = sample_trajectory(spec, t);
    CHECK((s.attitude - Mat3::Identity()).norm() < 1e-12);
    CHECK(s.velocity.norm() == 0.0);
    CHECK(s.acceleration.norm() == 0.0);
    CHECK(s.angular_rate_body.norm() == 0.0);
  }
  CHECK_THROWS(sample_trajectory(spec, -0.1));
  CHECK_THROWS(sample_trajectory(spec, 10.1));
}

TEST_CASE("line reaches cruise speed with aligned yaw") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kLine;
  spec.speed_mps = 2.0;
  spec.rest_time_s = 2.0;
  spec.ramp_time_s = 2.0;
  spec.duration_s = 20.0;
  const TrajectorySample s = sample_trajectory(spec, 10.0);
  CHECK((s.velocity - Vec3(2.0, 0.0, 0.0)).norm() < 1e-9);
  CHECK((s.attitude - Mat3::Identity()).norm() < 1e-9);  // yaw 0 along +x
  // stationary during the rest hold
  const TrajectorySample r = sample_trajectory(spec, 1.0);
  CHECK(r.velocity.norm() < 1e-12);
  check_derivatives(spec, 3.0, 1e-6);   // inside the ramp
  check_derivatives(spec, 12.0, 1e-6);  // cruise
}

TEST_CASE("helix analytic derivatives match finite differences") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kHelix;
  spec.speed_mps = 1.5;
  spec.duration_s = 40.0;
  for (int i = 0; i < 200; ++i) {
    check_derivatives(spec, 6.0 + i * (33.0 / 200.0), 1e-6);
  }
}

TEST_CASE("lemniscate analytic derivatives match finite differences") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kLemniscate;
  spec.speed_mps = 1.2;
  spec.duration_s = 40.0;
  for (int i = 0; i < 200; ++i) {
    check_derivatives(spec, 6.0 + i * (33.0 / 200.0), 1e-6);
  }
}

TEST_CASE("rounded rectangle position derivatives match finite differences") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kRoundedRectangle;
  spec.speed_mps = 1.0;
  spec.duration_s = 60.0;
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double t = 6.0 + i * (50.0 / 200.0);
    const TrajectorySample sm = sample_trajectory(spec, t - h);
    const TrajectorySample sp = sample_trajectory(spec, t + h);
    const TrajectorySample s = sample_trajectory(spec, t);
    // velocity is continuous everywhere; acceleration jumps at arc joints,
    // so only the first derivative is checked here
    const Vec3 v_fd = (sp.position - sm.position) / (2.0 * h);
    CHECK((s.velocity - v_fd).norm() <= 1e-5 * std::max(1.0, s.velocity.norm()));
  }
}

TEST_CASE("trajectory kind parsing") {
  CHECK(trajectory_kind_from_string("helix") == TrajectoryKind::kHelix);
  CHECK(trajectory_kind_from_string("static") == TrajectoryKind::kStatic);
  CHECK(trajectory_kind_from_string("rounded_rectangle") ==
        TrajectoryKind::kRoundedRectangle);
  CHECK(trajectory_kind_from_string("lemniscate") == TrajectoryKind::kLemniscate);
  CHECK(trajectory_kind_from_string("line") == TrajectoryKind::kLine);
  CHECK_THROWS(trajectory_kind_from_string("spiral"));
}
