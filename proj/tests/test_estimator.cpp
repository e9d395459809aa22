#include "rino/estimator.hpp"
#include "rino/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace rino;

namespace {

std::vector<ImuRecord> rest_buffer(double duration, const Vec3& gyro_bias,
                                   const Mat3& attitude) {
  std::vector<ImuRecord> out;
  const double dt = 0.005;
  const Vec3 f_body = attitude.transpose() * (-kGravity);
  for (double t = 0.0; t <= duration; t += dt) {
    out.push_back({t, gyro_bias, f_body});
  }
  return out;
}

SimDataset static_dataset(double duration, std::uint64_t seed) {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kStatic;
  spec.duration_s = duration;
  Environment env;
  env.targets = scatter_targets(200, Vec3(-15, -15, -5), Vec3(15, 15, 8), seed + 1);
  return synth_dataset(spec, env, chirp_preset("rc1"), RigSpec{}, seed);
}

std::optional<StampedPose> feed(Estimator& est, const SimDataset& ds) {
  std::optional<StampedPose> last;
  std::size_t ii = 0, ib = 0;
  for (const RadarScan& scan : ds.radar) {
    while (ii < ds.imu.size() && ds.imu[ii].t <= scan.timestamp_s) est.add_imu(ds.imu[ii++]);
    while (ib < ds.baro.size() && ds.baro[ib].t <= scan.timestamp_s) est.add_baro(ds.baro[ib++]);
    if (auto pose = est.add_radar(scan)) last = pose;
  }
  return last;
}

}  // namespace

TEST_CASE("at-rest initialization recovers bias and attitude") {
  EstimatorConfig cfg;

  SUBCASE("level rest with a gyro bias") {
    const Vec3 bg(0.002, -0.001, 0.0005);
    const auto init = initialize_at_rest(rest_buffer(1.5, bg, Mat3::Identity()), cfg);
    CHECK((init.state.gyro_bias - bg).norm() < 1e-12);
    CHECK((init.state.attitude - Mat3::Identity()).norm() < 1e-9);
    CHECK(init.state.position.norm() == 0.0);
    CHECK(init.state.velocity.norm() == 0.0);
  }

  SUBCASE("tilted rest recovers the gravity direction") {
    const Mat3 tilt = rot_zyx(0.0, deg2rad(10.0), deg2rad(-4.0));
    const auto init = initialize_at_rest(rest_buffer(1.5, Vec3::Zero(), tilt), cfg);
    const Vec3 down_true = tilt.transpose() * Vec3(0, 0, 1);
    const Vec3 down_est = init.state.attitude.transpose() * Vec3(0, 0, 1);
    CHECK((down_true - down_est).norm() < 1e-9);
  }

  SUBCASE("motion is rejected") {
    auto buffer = rest_buffer(1.5, Vec3::Zero(), Mat3::Identity());
    for (std::size_t i = 0; i < buffer.size(); ++i) {
      buffer[i].angular_rate += Vec3(0.5 * std::sin(0.1 * i), 0, 0);
    }
    CHECK_THROWS_AS(initialize_at_rest(buffer, cfg), std::runtime_error);
  }

  SUBCASE("too-short buffer is rejected") {
    CHECK_THROWS(initialize_at_rest(rest_buffer(0.2, Vec3::Zero(), Mat3::Identity()), cfg));
  }
}

TEST_CASE("high-rate propagation matches constant-velocity truth") {
  NavState s;
  s.velocity = Vec3(1.0, -0.5, 0.2);
  std::vector<ImuRecord> imu;
  for (int i = 1; i <= 100; ++i) {
    // constant velocity: specific force cancels gravity exactly
    imu.push_back({0.01 * i, Vec3::Zero(), Vec3(0, 0, kGravityMps2)});
  }
  const auto poses = propagate_high_rate(s, 0.0, imu);
  // an anchor pose at t0 plus one pose per IMU record
  REQUIRE(poses.size() == imu.size() + 1);
  CHECK(poses.front().t == 0.0);
  CHECK(poses.front().position.norm() == 0.0);
  const StampedPose& last = poses.back();
  CHECK(last.t == doctest::Approx(1.0));
  CHECK((last.position - s.velocity * 1.0).norm() < 1e-9);
  CHECK((last.velocity - s.velocity).norm() < 1e-9);
  CHECK(propagate_high_rate(s, 0.0, {}).size() == 1);
}

TEST_CASE("static dataset keeps the estimate pinned near the origin") {
  const SimDataset ds = static_dataset(12.0, 99);
  Estimator est(EstimatorConfig{});
  const auto last = feed(est, ds);
  REQUIRE(last.has_value());
  CHECK(est.initialized());
  CHECK(last->velocity.norm() <= 1e-3);
  CHECK(last->position.norm() <= 0.05);
  CHECK(est.map().size() > 0);
  // window bounded by the lag
  CHECK(est.window_size() <= static_cast<int>(est.config().lag_s * 10.0) + 2);
  // covariance of the newest node is symmetric PSD
  const Eigen::MatrixXd cov = est.latest_covariance();
  REQUIRE(cov.rows() == 16);
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  // high-rate output re-integrates from the newest node
  const auto hi = est.high_rate_since_last_node();
  for (const StampedPose& p : hi) CHECK(p.position.allFinite());
}

TEST_CASE("estimator config loads from YAML") {
  const char* path = "test_estimator_cfg.yaml";
  {
    std::ofstream os(path);
    os << "chirp: rc3\n"
       << "lag_s: 3.5\n"
       << "lm_iterations: 7\n"
       << "kappa_static: 2.5\n"
       << "angle_noise_on: false\n"
       << "registration_on: false\n"
       << "baro_on: false\n"
       << "extrinsics:\n"
       << "  yaw_deg: 90.0\n"
       << "  lever_arm: [0.1, 0.0, -0.05]\n";
  }
  const EstimatorConfig cfg = load_estimator_config(path);
  CHECK(cfg.chirp.name == "rc3");
  CHECK(cfg.lag_s == doctest::Approx(3.5));
  CHECK(cfg.lm_iterations == 7);
  CHECK(cfg.kappa_static == doctest::Approx(2.5));
  CHECK_FALSE(cfg.angle_noise_on);
  CHECK_FALSE(cfg.registration_on);
  CHECK_FALSE(cfg.baro_on);
  CHECK((cfg.extrinsics.rotation - rot_z(M_PI / 2.0)).norm() < 1e-12);
  CHECK((cfg.extrinsics.lever_arm - Vec3(0.1, 0.0, -0.05)).norm() < 1e-12);
  std::remove(path);
}
