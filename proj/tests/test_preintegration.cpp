#include "rino/preintegration.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace rino;

TEST_CASE("zero input leaves the identity increments") {
  PreintegratedImu pim(ImuNoiseParams{}, Vec3::Zero(), Vec3::Zero());
  for (int i = 0; i < 100; ++i) pim.integrate(Vec3::Zero(), Vec3::Zero(), 0.005);
  CHECK((pim.delta_rotation() - Mat3::Identity()).norm() < 1e-14);
  CHECK(pim.delta_velocity().norm() < 1e-14);
  CHECK(pim.delta_position().norm() < 1e-14);
  CHECK(pim.delta_time() == doctest::Approx(0.5));
}

TEST_CASE("constant rotation rate closed form") {
  PreintegratedImu pim(ImuNoiseParams{}, Vec3::Zero(), Vec3::Zero());
  const Vec3 omega(0.0, 0.0, M_PI / 2.0);
  const int n = 200;
  for (int i = 0; i < n; ++i) pim.integrate(omega, Vec3::Zero(), 1.0 / n);
  CHECK((pim.delta_rotation() - rot_z(M_PI / 2.0)).norm() < 1e-6);
}

TEST_CASE("constant force closed form") {
  PreintegratedImu pim(ImuNoiseParams{}, Vec3::Zero(), Vec3::Zero());
  const int n = 1000;
  for (int i = 0; i < n; ++i) pim.integrate(Vec3::Zero(), Vec3(1, 0, 0), 1.0 / n);
  CHECK((pim.delta_velocity() - Vec3(1, 0, 0)).norm() < 1e-9);
  CHECK((pim.delta_position() - Vec3(0.5, 0, 0)).norm() < 1e-9);
}

TEST_CASE("segment integration rejects non-monotone timestamps") {
  PreintegratedImu pim(ImuNoiseParams{}, Vec3::Zero(), Vec3::Zero());
  std::vector<ImuRecord> recs(3);
  recs[0].t = 0.0;
  recs[1].t = 0.01;
  recs[2].t = 0.005;
  CHECK_THROWS(pim.integrate_segment(recs));
}

TEST_CASE("covariance grows with the integration span") {
  PreintegratedImu pim(ImuNoiseParams{}, Vec3::Zero(), Vec3::Zero());
  double prev = 0.0;
  for (int i = 0; i < 50; ++i) {
    pim.integrate(Vec3(0.1, -0.05, 0.2), Vec3(0.3, 0.1, 9.8), 0.005);
    const double tr = pim.covariance().trace();
    CHECK(tr > prev);
    prev = tr;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(pim.covariance());
  CHECK(es.eigenvalues().minCoeff() >= -1e-18);
}

TEST_CASE("first-order bias correction approximates re-integration") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 bg0(0.002, -0.001, 0.0015);
  const Vec3 ba0(0.05, -0.02, 0.03);

  std::vector<Vec3> rates, forces;
  for (int i = 0; i < 200; ++i) {
    rates.emplace_back(0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng));
    forces.emplace_back(u(rng), u(rng), 9.81 + u(rng));
  }

  PreintegratedImu pim(ImuNoiseParams{}, bg0, ba0);
  for (int i = 0; i < 200; ++i) pim.integrate(rates[i], forces[i], 0.005);

  const Vec3 dbg(1e-3, -5e-4, 8e-4);
  const Vec3 dba(5e-3, 2e-3, -4e-3);
  PreintegratedImu exact(ImuNoiseParams{}, bg0 + dbg, ba0 + dba);
  for (int i = 0; i < 200; ++i) exact.integrate(rates[i], forces[i], 0.005);

  CHECK((pim.corrected_delta_rotation(bg0 + dbg) - exact.delta_rotation()).norm() < 1e-6);
  CHECK((pim.corrected_delta_velocity(bg0 + dbg, ba0 + dba) - exact.delta_velocity()).norm() <
        1e-5);
  CHECK((pim.corrected_delta_position(bg0 + dbg, ba0 + dba) - exact.delta_position()).norm() <
        1e-5);

  CHECK_FALSE(pim.bias_drift_exceeds(bg0 + Vec3::Constant(1e-4), ba0));
  CHECK(pim.bias_drift_exceeds(bg0 + Vec3::Constant(0.1), ba0));
}
