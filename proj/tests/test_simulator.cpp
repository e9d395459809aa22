#include "rino/atmosphere.hpp"
#include "rino/dataset.hpp"
#include "rino/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

using namespace rino;

TEST_CASE("imu synthesis at rest reads gravity on body z") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kStatic;
  spec.duration_s = 2.0;
  RigSpec rig;  // noise off by default
  const auto imu = synth_imu(spec, rig, 42);
  REQUIRE(!imu.empty());
  for (const ImuRecord& r : imu) {
    CHECK((r.specific_force - Vec3(0, 0, kGravityMps2)).norm() < 1e-12);
    CHECK(r.angular_rate.norm() < 1e-12);
  }
  // monotone timestamps
  for (std::size_t i = 1; i < imu.size(); ++i) CHECK(imu[i].t > imu[i - 1].t);
}

TEST_CASE("imu synthesis reproduces the true angular rate without noise") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kHelix;
  spec.speed_mps = 1.0;
  spec.duration_s = 15.0;
  RigSpec rig;
  const auto imu = synth_imu(spec, rig, 1);
  for (const ImuRecord& r : imu) {
    const TrajectorySample s = sample_trajectory(spec, r.t);
    CHECK((r.angular_rate - s.angular_rate_body).norm() < 1e-10);
    const Vec3 expected_f = s.attitude.transpose() * (s.acceleration - kGravity);
    CHECK((r.specific_force - expected_f).norm() < 1e-10);
  }
}

TEST_CASE("radar scan of a single boresight target") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kStatic;
  spec.duration_s = 1.0;
  Environment env;
  env.targets = {Vec3(10.0, 0.0, 0.0)};
  const ChirpConfig cfg = chirp_preset("rc1");
  const RigSpec rig;
  const TrajectorySample truth = sample_trajectory(spec, 0.5);
  const RadarScan scan = synth_radar_scan(truth, 0.5, env, cfg, rig, 3);
  REQUIRE(scan.points.size() == 1);
  const RadarPoint& pt = scan.points[0];
  const double bin = derive_properties(cfg).bin_width_range_m;
  CHECK(std::abs(pt.range_m - 10.0) <= bin / 2.0 + 1e-12);
  CHECK(pt.radial_speed_mps == doctest::Approx(0.0));
  CHECK(pt.phases.w_y == doctest::Approx(0.0));
  CHECK(pt.phases.w_z == doctest::Approx(0.0));
  CHECK_FALSE(pt.aliased);
}

TEST_CASE("synthesized doppler equals the projected ego velocity before quantization") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kLine;
  spec.speed_mps = 3.0;
  spec.duration_s = 12.0;
  Environment env;
  env.targets = scatter_targets(300, Vec3(-5, -15, -5), Vec3(40, 15, 8), 77);
  const ChirpConfig cfg = chirp_preset("rc1");
  RigSpec rig;
  rig.radar_lever_arm = Vec3(0.1, 0.02, -0.03);
  rig.radar_rotation = rot_zyx(0.05, -0.02, 0.01);
  const DerivedRadarProperties props = derive_properties(cfg);

  int checked = 0;
  for (double t : {5.0, 7.5, 10.0}) {
    const TrajectorySample truth = sample_trajectory(spec, t);
    const RadarScan scan = synth_radar_scan(truth, t, env, cfg, rig, 123);
    const Vec3 omega = truth.angular_rate_body;
    const Vec3 v_radar = rig.radar_rotation.transpose() *
                         (truth.attitude.transpose() * truth.velocity +
                          omega.cross(rig.radar_lever_arm));
    for (const RadarPoint& pt : scan.points) {
      REQUIRE(pt.truth_phases.has_value());
      REQUIRE(pt.truth_radial_speed_mps.has_value());
      const Vec3 mu = phases_to_bearing(*pt.truth_phases).mu;
      // Eq.-10 consistency of the truth annotation
      CHECK(std::abs(*pt.truth_radial_speed_mps - (-mu.dot(v_radar))) < 1e-12);
      // quantization-only errors bounded by half a bin per channel
      CHECK(std::abs(pt.range_m - *pt.truth_range_m) <= props.bin_width_range_m / 2 + 1e-12);
      CHECK(std::abs(pt.phases.w_y - pt.truth_phases->w_y) <=
            props.bin_width_phase_rad / 2 + 1e-12);
      CHECK(std::abs(pt.phases.w_z - pt.truth_phases->w_z) <=
            props.bin_width_phase_rad / 2 + 1e-12);
      const AliasResult wrapped = alias_wrap(*pt.truth_radial_speed_mps, cfg.max_doppler_mps);
      CHECK(pt.aliased == wrapped.aliased);
      CHECK(std::abs(pt.radial_speed_mps - wrapped.v_measured_mps) <=
            props.bin_width_doppler_mps / 2 + 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("aliasing appears above the doppler limit on a fast line") {
  Environment env;
  env.targets = scatter_targets(2000, Vec3(-10, -15, -5), Vec3(120, 15, 8), 5);
  const ChirpConfig cfg = chirp_preset("rc1");
  const RigSpec rig;

  auto aliased_count_at_speed = [&](double speed) {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::kLine;
    spec.speed_mps = speed;
    spec.duration_s = 12.0;
    const TrajectorySample truth = sample_trajectory(spec, 8.0);
    const RadarScan scan = synth_radar_scan(truth, 8.0, env, cfg, rig, 99);
    int n = 0;
    for (const RadarPoint& pt : scan.points) n += pt.aliased ? 1 : 0;
    return std::make_pair(n, static_cast<int>(scan.points.size()));
  };

  const auto [slow_aliased, slow_total] = aliased_count_at_speed(3.0);
  CHECK(slow_aliased == 0);
  CHECK(slow_total > 0);
  const auto [fast_aliased, fast_total] = aliased_count_at_speed(6.0);
  CHECK(fast_aliased > 0);
  CHECK(fast_total > 0);
}

TEST_CASE("barometer synthesis round trip") {
  CHECK(altitude_from_pressure(101325.0) == doctest::Approx(0.0));
  CHECK(altitude_from_pressure(pressure_from_altitude(100.0)) ==
        doctest::Approx(100.0).epsilon(1e-9));
  CHECK(altitude_from_pressure(pressure_from_altitude(-25.0)) ==
        doctest::Approx(-25.0).epsilon(1e-9));

  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kStatic;
  spec.duration_s = 2.0;
  RigSpec rig;  // baro noise off
  const auto baro = synth_baro(spec, rig, 7);
  REQUIRE(!baro.empty());
  for (const BaroRecord& r : baro) {
    CHECK(r.pressure_pa == doctest::Approx(101325.0).epsilon(1e-9));
  }
}

TEST_CASE("dataset round trips through the line-delimited serialization") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kLine;
  spec.speed_mps = 2.0;
  spec.duration_s = 8.0;
  Environment env;
  env.targets = scatter_targets(100, Vec3(-5, -10, -3), Vec3(25, 10, 6), 13);
  const SimDataset ds = synth_dataset(spec, env, chirp_preset("rc1"), RigSpec{}, 2024);
  CHECK(!ds.imu.empty());
  CHECK(!ds.radar.empty());
  CHECK(!ds.baro.empty());
  CHECK(ds.truth.size() == ds.imu.size());

  std::stringstream ss;
  write_dataset(ds, ss);
  const SimDataset back = read_dataset(ss);
  REQUIRE(back.imu.size() == ds.imu.size());
  REQUIRE(back.radar.size() == ds.radar.size());
  REQUIRE(back.baro.size() == ds.baro.size());
  for (std::size_t i = 0; i < ds.radar.size(); ++i) {
    CHECK(back.radar[i].timestamp_s == doctest::Approx(ds.radar[i].timestamp_s));
    REQUIRE(back.radar[i].points.size() == ds.radar[i].points.size());
    for (std::size_t j = 0; j < ds.radar[i].points.size(); ++j) {
      CHECK(back.radar[i].points[j].range_m ==
            doctest::Approx(ds.radar[i].points[j].range_m).epsilon(1e-12));
      CHECK(back.radar[i].points[j].aliased == ds.radar[i].points[j].aliased);
    }
  }

  std::stringstream bad(
      "{\"type\":\"imu\",\"t\":0,\"w\":[0,0,0],\"f\":[0,0,9.81]}\nnot json\n");
  CHECK_THROWS_WITH_AS(read_dataset(bad), doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("same seed gives a bit-identical dataset") {
  TrajectorySpec spec;
  spec.kind = TrajectoryKind::kHelix;
  spec.speed_mps = 1.0;
  spec.duration_s = 6.0;
  Environment env;
  env.targets = scatter_targets(150, Vec3(-8, -8, -4), Vec3(8, 8, 6), 21);
  env.dropout_probability = 0.1;
  RigSpec rig;
  rig.imu_noise_enabled = true;
  rig.baro_noise_enabled = true;
  std::stringstream a, b;
  write_dataset(synth_dataset(spec, env, chirp_preset("rc2"), rig, 555), a);
  write_dataset(synth_dataset(spec, env, chirp_preset("rc2"), rig, 555), b);
  CHECK(a.str() == b.str());
  std::stringstream c;
  write_dataset(synth_dataset(spec, env, chirp_preset("rc2"), rig, 556), c);
  CHECK(a.str() != c.str());
}
