#include "rino/noise_model.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace rino;

namespace {

AoaPhases random_interior_phases(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-deg2rad(60.0), deg2rad(60.0));
  return angles_to_phases(ang(rng), ang(rng));
}

}  // namespace

TEST_CASE("bearing jacobian closed form and finite differences") {
  const auto j0 = bearing_jacobian({0.0, 0.0});
  CHECK(j0(0, 0) == doctest::Approx(0.0));
  CHECK(j0(0, 1) == doctest::Approx(0.0));
  CHECK(j0(1, 0) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(j0(2, 1) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  CHECK(j0(1, 1) == doctest::Approx(0.0));
  CHECK(j0(2, 0) == doctest::Approx(0.0));

  const auto j1 = bearing_jacobian({M_PI / 2.0, 0.0});
  CHECK(j1(0, 0) == doctest::Approx(-(M_PI / 2.0) /
                                    (M_PI * M_PI * std::sqrt(3.0) / 2.0)).epsilon(1e-9));
  CHECK(j1(0, 1) == doctest::Approx(0.0));

  CHECK_THROWS_AS(bearing_jacobian({M_PI - 1e-9, 0.0}), std::domain_error);

  std::mt19937_64 rng(5);
  const double h = 1e-7;
  for (int i = 0; i < 100; ++i) {
    const AoaPhases w = random_interior_phases(rng);
    const auto j = bearing_jacobian(w);
    const Vec3 dy = (phases_to_bearing({w.w_y + h, w.w_z}).mu -
                     phases_to_bearing({w.w_y - h, w.w_z}).mu) / (2.0 * h);
    const Vec3 dz = (phases_to_bearing({w.w_y, w.w_z + h}).mu -
                     phases_to_bearing({w.w_y, w.w_z - h}).mu) / (2.0 * h);
    CHECK((j.col(0) - dy).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, dy.norm()));
    CHECK((j.col(1) - dz).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, dz.norm()));
  }
}

TEST_CASE("bearing covariance structure") {
  const double sigma = deg2rad(1.6238);
  const BearingCovariance c0 = bearing_covariance({0.0, 0.0}, PhaseNoise{sigma, sigma});
  CHECK(c0.sigma_mu(0, 0) == doctest::Approx(0.0));
  CHECK(c0.sigma_mu(1, 1) == doctest::Approx(8.139e-5).epsilon(2e-3));
  CHECK(c0.sigma_mu(2, 2) == doctest::Approx(8.139e-5).epsilon(2e-3));

  CHECK(bearing_covariance({0.3, -0.2}, PhaseNoise{0.0, 0.0}).sigma_mu.norm() == 0.0);

  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const AoaPhases w = random_interior_phases(rng);
    const Mat3 s = bearing_covariance(w, PhaseNoise{sigma, sigma}).sigma_mu;
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat3> es(s);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    // rank <= 2: the smallest eigenvalue is (numerically) zero
    CHECK(es.eigenvalues()(0) < 1e-12 * std::max(1.0, es.eigenvalues()(2)));
  }
}

TEST_CASE("bearing covariance agrees with a sampling oracle") {
  const ChirpConfig cfg = chirp_preset("rc1");
  const DerivedRadarProperties props = derive_properties(cfg);
  const PhaseNoise pn = PhaseNoise::from_bin_width(props.bin_width_phase_rad);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const double az : {-40.0, 0.0, 35.0}) {
    for (const double el : {-30.0, 0.0, 25.0}) {
      const AoaPhases w = angles_to_phases(deg2rad(az), deg2rad(el));
      const Mat3 predicted = bearing_covariance(w, pn).sigma_mu;
      Mat3 sum = Mat3::Zero();
      Vec3 mean = Vec3::Zero();
      const int n = 200000;
      std::vector<Vec3> samples;
      samples.reserve(n);
      for (int i = 0; i < n; ++i) {
        const AoaPhases noisy{w.w_y + u(rng) * props.bin_width_phase_rad,
                              w.w_z + u(rng) * props.bin_width_phase_rad};
        const Vec3 mu = phases_to_bearing(noisy).mu;
        samples.push_back(mu);
        mean += mu;
      }
      mean /= n;
      for (const Vec3& mu : samples) sum += (mu - mean) * (mu - mean).transpose();
      const Mat3 empirical = sum / (n - 1);
      CHECK((empirical - predicted).norm() <= 0.10 * predicted.norm());
    }
  }
}

TEST_CASE("doppler residual variance") {
  const QuantNoise q = QuantNoise::from_bin_width(0.12484);
  const AoaPhases w0{0.0, 0.0};
  const PhaseNoise pn = PhaseNoise::from_bin_width(2.0 * M_PI / 64.0);
  const BearingCovariance cov0 = bearing_covariance(w0, pn);

  // zero velocity: exactly the Doppler quantization variance
  CHECK(doppler_residual_variance(phases_to_bearing(w0), Vec3::Zero(), q, cov0) ==
        doctest::Approx(q.variance()).epsilon(1e-12));
  // boresight bearing, forward velocity: first diagonal of the bearing
  // covariance is zero, so the angle term vanishes
  CHECK(doppler_residual_variance(phases_to_bearing(w0), Vec3(3.995, 0, 0), q, cov0) ==
        doctest::Approx(q.variance()).epsilon(1e-12));

  // monotone non-decreasing in speed for a fixed direction
  const AoaPhases w{0.8, -0.5};
  const BearingCovariance cov = bearing_covariance(w, pn);
  const Vec3 dir = Vec3(1.0, 0.4, -0.2).normalized();
  double prev = 0.0;
  for (double s = 0.0; s <= 8.0; s += 0.5) {
    const double var =
        doppler_residual_variance(phases_to_bearing(w), s * dir, q, cov);
    CHECK(var >= prev - 1e-15);
    CHECK(var > 0.0);
    prev = var;
  }

  // optional gyro term adds a non-negative quadratic form
  GyroTerm g;
  g.jacobian = Eigen::RowVector3d(0.1, -0.2, 0.05);
  g.avg_rate_covariance = Mat3::Identity() * 1e-4;
  const double with_gyro =
      doppler_residual_variance(phases_to_bearing(w), 2.0 * dir, q, cov, g);
  const double without =
      doppler_residual_variance(phases_to_bearing(w), 2.0 * dir, q, cov);
  CHECK(with_gyro >= without);
  CHECK(with_gyro - without ==
        doctest::Approx((g.jacobian * g.avg_rate_covariance *
                         g.jacobian.transpose())(0)).epsilon(1e-9));
}

TEST_CASE("registration covariance") {
  const QuantNoise qd = QuantNoise::from_bin_width(20.013 / 256.0);
  const PhaseNoise pn = PhaseNoise::from_bin_width(2.0 * M_PI / 64.0);
  const AoaPhases w0{0.0, 0.0};
  const BearingCovariance cov0 = bearing_covariance(w0, pn);

  // zero noises -> zero matrix
  CHECK(registration_covariance(phases_to_bearing(w0), 10.0,
                                QuantNoise::from_bin_width(0.0),
                                BearingCovariance{}, Mat3::Identity(), Mat3::Zero())
            .norm() == 0.0);

  // boresight at d = 10: diagonal with the documented entries
  const Mat3 r10 = registration_covariance(phases_to_bearing(w0), 10.0, qd, cov0,
                                           Mat3::Identity(), Mat3::Zero());
  CHECK(r10(0, 0) == doctest::Approx(qd.variance()).epsilon(1e-9));
  CHECK(r10(1, 1) == doctest::Approx(100.0 * 8.139e-5).epsilon(2e-3));
  CHECK(r10(2, 2) == doctest::Approx(100.0 * 8.139e-5).epsilon(2e-3));
  CHECK(std::abs(r10(0, 1)) < 1e-12);

  // bearing-driven part scales with d^2
  const AoaPhases w{0.6, 0.3};
  const BearingCovariance cov = bearing_covariance(w, pn);
  const Bearing mu = phases_to_bearing(w);
  const Mat3 base = qd.variance() * mu.mu * mu.mu.transpose();
  const Mat3 c1 = registration_covariance(mu, 1.0, qd, cov, Mat3::Identity(), Mat3::Zero());
  const Mat3 c10 = registration_covariance(mu, 10.0, qd, cov, Mat3::Identity(), Mat3::Zero());
  CHECK(((c10 - base) - 100.0 * (c1 - base)).norm() < 1e-9);

  // trace invariant under rotation when sigma_q = 0
  const Mat3 rot = rot_zyx(0.7, -0.3, 0.2);
  const Mat3 rotated = registration_covariance(mu, 5.0, qd, cov, rot, Mat3::Zero());
  const Mat3 plain = registration_covariance(mu, 5.0, qd, cov, Mat3::Identity(), Mat3::Zero());
  CHECK(rotated.trace() == doctest::Approx(plain.trace()).epsilon(1e-12));

  // PSD and symmetric
  Eigen::SelfAdjointEigenSolver<Mat3> es(rotated);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK((rotated - rotated.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("monte carlo measurement oracle reproduces the theoretical stds") {
  const ChirpConfig cfg = chirp_preset("rc3");
  McScenario sc;
  sc.samples = 400000;
  sc.seed = 123;
  const McStatistics st = mc_measurement_oracle(cfg, sc);
  CHECK(st.doppler_error_std == doctest::Approx(0.0175).epsilon(0.05));
  CHECK(st.range_error_std == doctest::Approx(0.0563).epsilon(0.05));
  CHECK(rad2deg(st.phase_y_error_std) == doctest::Approx(1.6238).epsilon(0.05));
  CHECK(rad2deg(st.phase_z_error_std) == doctest::Approx(1.6238).epsilon(0.05));
  CHECK(std::abs(st.doppler_error_mean) < 0.1 * 0.0175);
  CHECK(std::abs(st.range_error_mean) < 0.1 * 0.0563);
}
