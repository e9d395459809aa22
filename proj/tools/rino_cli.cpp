#include "rino/analysis.hpp"
#include "rino/dataset.hpp"
#include "rino/estimator.hpp"
#include "rino/evaluation.hpp"
#include "rino/synth_config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <vector>

namespace {

using nlohmann::json;
using namespace rino;

Vec3 to_velocity(const std::vector<double>& v, double forward_speed) {
  if (!v.empty()) {
    if (v.size() != 3) throw CLI::ValidationError("--velocity expects three numbers");
    return Vec3(v[0], v[1], v[2]);
  }
  return Vec3(forward_speed, 0.0, 0.0);
}

ChirpConfig resolve_chirp(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty()) return load_chirp_config(config_path);
  return chirp_preset(preset);
}

json grid_meta(const GridResult& g) {
  return json{{"config", g.config_name},
              {"velocity", {g.velocity.x(), g.velocity.y(), g.velocity.z()}},
              {"value", g.value_name},
              {"azimuth_cells", g.azimuths_deg.size()},
              {"elevation_cells", g.elevations_deg.size()}};
}

int cmd_noise_sim(const std::string& config, const std::string& preset, double speed,
                  const std::vector<double>& velocity, std::int64_t samples,
                  std::uint64_t seed, double fov_deg, const std::string& out) {
  const ChirpConfig cfg = resolve_chirp(config, preset);
  const Vec3 v = to_velocity(velocity, speed);
  const NoiseSimResult res = noise_sim(cfg, v, samples, seed, fov_deg);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot open '" + out + "' for writing");
    os.precision(9);
    os << "doppler_error_mps\n";
    for (double s : res.samples) os << s << '\n';
  }
  json j{{"command", "noise-sim"},
         {"config", cfg.name},
         {"velocity", {v.x(), v.y(), v.z()}},
         {"samples", res.samples.size()},
         {"bin_width_doppler_mps", res.bin_width_doppler},
         {"sample_mean_mps", res.sample_mean},
         {"sample_std_mps", res.sample_std},
         {"predicted_std_mps", res.predicted_std}};
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_approx_error(const std::string& config, const std::string& preset, double speed,
                     const std::vector<double>& velocity, double spacing_deg,
                     std::int64_t samples_per_cell, std::uint64_t seed, double fov_deg,
                     int threads, const std::string& out) {
  const ChirpConfig cfg = resolve_chirp(config, preset);
  const Vec3 v = to_velocity(velocity, speed);
  const GridResult grid =
      approx_error_grid(cfg, v, spacing_deg, samples_per_cell, seed, fov_deg, threads);
  if (!out.empty()) write_grid_csv(grid, out);

  double max_err = 0.0;
  int below_1mm = 0, valid = 0;
  std::vector<double> vals;
  for (double x : grid.values) {
    if (std::isnan(x)) continue;
    ++valid;
    vals.push_back(x);
    max_err = std::max(max_err, x);
    if (x < 1e-3) ++below_1mm;
  }
  std::sort(vals.begin(), vals.end());
  const double p80 = vals.empty() ? 0.0 : vals[static_cast<std::size_t>(0.8 * (vals.size() - 1))];
  json j = grid_meta(grid);
  j["command"] = "approx-error";
  j["max_error_mps"] = max_err;
  j["p80_error_mps"] = p80;
  j["fraction_below_1mm"] = valid > 0 ? static_cast<double>(below_1mm) / valid : 0.0;
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_contour(const std::string& config, const std::vector<std::string>& presets,
                double speed, const std::vector<double>& velocity, double spacing_deg,
                double fov_deg, const std::string& out) {
  const Vec3 v = to_velocity(velocity, speed);
  std::vector<ChirpConfig> cfgs;
  if (!config.empty()) cfgs.push_back(load_chirp_config(config));
  for (const std::string& p : presets) cfgs.push_back(chirp_preset(p));
  if (cfgs.empty()) cfgs.push_back(chirp_preset("rc1"));

  json summaries = json::array();
  for (const ChirpConfig& cfg : cfgs) {
    const GridResult grid = contour_grid(cfg, v, spacing_deg, fov_deg);
    const RadarNoise noise = RadarNoise::from_config(cfg);
    if (!out.empty()) {
      std::string path = out;
      if (cfgs.size() > 1) {
        const auto dot = path.rfind('.');
        const std::string stem = dot == std::string::npos ? path : path.substr(0, dot);
        const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
        path = stem + "_" + cfg.name + ext;
      }
      write_grid_csv(grid, path);
    }
    const ContourSummary s = summarize_contour(grid, noise.doppler.std_dev);
    json js = grid_meta(grid);
    js["sigma_vr_mps"] = noise.doppler.std_dev;
    js["level_set_exists"] = s.level_set_exists;
    js["below_fraction"] = s.below_fraction;
    js["equivalent_radius_deg"] = s.equivalent_radius_deg;
    js["centroid_azimuth_deg"] = s.centroid_azimuth_deg;
    js["centroid_elevation_deg"] = s.centroid_elevation_deg;
    summaries.push_back(js);
  }
  std::cout << json{{"command", "contour"}, {"grids", summaries}}.dump(2) << std::endl;
  return 0;
}

int cmd_alias_region(const std::string& config, const std::string& preset, double speed,
                     const std::vector<double>& velocity, double spacing_deg, double fov_deg,
                     const std::string& out) {
  const ChirpConfig cfg = resolve_chirp(config, preset);
  const Vec3 v = to_velocity(velocity, speed);
  const GridResult grid = alias_region_grid(cfg, v, spacing_deg, fov_deg);
  if (!out.empty()) write_grid_csv(grid, out);
  json j = grid_meta(grid);
  j["command"] = "alias-region";
  j["max_doppler_mps"] = cfg.max_doppler_mps;
  j["aliased_fraction"] = aliased_fraction(grid, cfg.max_doppler_mps);
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_synth(const std::string& config, std::uint64_t seed, const std::string& out) {
  if (config.empty()) throw CLI::ValidationError("synth requires --config");
  if (out.empty()) throw CLI::ValidationError("synth requires --out");
  const SynthConfig cfg = load_synth_config(config);
  const SimDataset ds = run_synth(cfg, seed);
  write_dataset(ds, out);
  const ScanCountSummary counts = summarize_scan_counts(ds);
  json j{{"command", "synth"},
         {"out", out},
         {"seed", seed},
         {"duration_s", cfg.trajectory.duration_s},
         {"imu_records", ds.imu.size()},
         {"baro_records", ds.baro.size()},
         {"radar_scans", ds.radar.size()},
         {"nominal_points", {{"mean", counts.nominal_mean}, {"std", counts.nominal_std}}},
         {"aliased_points", {{"mean", counts.aliased_mean}, {"std", counts.aliased_std}}},
         {"longest_nominal_gap_s", counts.longest_nominal_gap_s}};
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_odom(const std::string& dataset_path, const std::string& config,
             const std::string& out) {
  if (dataset_path.empty()) throw CLI::ValidationError("odom requires --dataset");
  if (out.empty()) throw CLI::ValidationError("odom requires --out");
  const SimDataset ds = read_dataset(dataset_path);
  EstimatorConfig cfg;
  if (!config.empty()) cfg = load_estimator_config(config);
  Estimator est(cfg);

  std::vector<StampedPose> low_rate;
  std::vector<StampedPose> high_rate;
  std::vector<double> scan_ms;

  std::size_t ii = 0, ib = 0;
  for (const RadarScan& scan : ds.radar) {
    while (ii < ds.imu.size() && ds.imu[ii].t <= scan.timestamp_s) est.add_imu(ds.imu[ii++]);
    while (ib < ds.baro.size() && ds.baro[ib].t <= scan.timestamp_s) est.add_baro(ds.baro[ib++]);
    const auto t0 = std::chrono::steady_clock::now();
    const auto pose = est.add_radar(scan);
    const auto t1 = std::chrono::steady_clock::now();
    if (pose) {
      scan_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      low_rate.push_back(*pose);
    }
  }
  // High-rate tail after the final scan.
  if (est.initialized()) {
    while (ii < ds.imu.size()) est.add_imu(ds.imu[ii++]);
    const auto tail = est.high_rate_since_last_node();
    high_rate.insert(high_rate.end(), tail.begin(), tail.end());
  }

  write_tum(low_rate, out + "_lowrate.tum");
  write_tum(high_rate, out + "_highrate.tum");

  std::sort(scan_ms.begin(), scan_ms.end());
  const auto pct = [&scan_ms](double p) {
    if (scan_ms.empty()) return 0.0;
    return scan_ms[static_cast<std::size_t>(p * (scan_ms.size() - 1))];
  };
  double mean_ms = 0.0;
  for (double m : scan_ms) mean_ms += m;
  if (!scan_ms.empty()) mean_ms /= static_cast<double>(scan_ms.size());
  json j{{"command", "odom"},
         {"scans_processed", low_rate.size()},
         {"map_points", est.map().size()},
         {"scan_wall_time_ms",
          {{"mean", mean_ms}, {"p50", pct(0.5)}, {"p90", pct(0.9)}, {"max", pct(1.0)}}}};
  if (!low_rate.empty()) {
    const StampedPose& last = low_rate.back();
    j["final_position"] = {last.position.x(), last.position.y(), last.position.z()};
  }
  std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_eval(const std::string& estimate_path, const std::string& truth_path) {
  if (estimate_path.empty() || truth_path.empty()) {
    throw CLI::ValidationError("eval requires --estimate and --truth");
  }
  const auto estimate = read_tum(estimate_path);
  const auto truth = read_tum(truth_path);
  const ErrorStats ape = absolute_position_error(estimate, truth);
  const ErrorStats rpe = relative_position_error(estimate, truth);
  const auto stats_json = [](const ErrorStats& s) {
    return json{{"rmse_m", s.rmse},
                {"mean_m", s.mean},
                {"std_m", s.std_dev},
                {"max_m", s.max},
                {"count", s.count}};
  };
  json j{{"command", "eval"},
         {"ape", stats_json(ape)},
         {"rpe_10m", stats_json(rpe)}};
  std::cout << j.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4D radar-inertial analysis and odometry toolkit"};
  app.require_subcommand(1);

  std::string config, out, preset = "rc1";
  std::vector<std::string> presets;
  std::uint64_t seed = 0;
  double speed = 0.0, spacing = 1.0, fov = 60.0;
  std::vector<double> velocity;
  std::int64_t samples = 1000000;
  int threads = 1;
  std::string dataset_path, estimate_path, truth_path;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "configuration file");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--out", out, "output file path");
  };

  CLI::App* noise = app.add_subcommand("noise-sim", "Doppler residual error distribution");
  add_common(noise);
  noise->add_option("--preset", preset, "chirp preset rc1..rc4");
  noise->add_option("--speed", speed, "forward speed, m/s");
  noise->add_option("--velocity", velocity, "velocity vector x y z, m/s")->expected(3);
  noise->add_option("--samples", samples, "MC sample count");
  noise->add_option("--fov-deg", fov, "half field of view, deg");

  CLI::App* approx = app.add_subcommand("approx-error", "first-order approximation error grid");
  add_common(approx);
  approx->add_option("--preset", preset, "chirp preset rc1..rc4");
  approx->add_option("--speed", speed, "forward speed, m/s");
  approx->add_option("--velocity", velocity, "velocity vector x y z, m/s")->expected(3);
  approx->add_option("--spacing-deg", spacing, "grid spacing, deg");
  approx->add_option("--samples", samples, "MC samples per cell");
  approx->add_option("--fov-deg", fov, "half field of view, deg");
  approx->add_option("--threads", threads, "worker threads");

  double contour_fov = 90.0;
  CLI::App* contour = app.add_subcommand("contour", "AoA noise contribution and level set");
  add_common(contour);
  contour->add_option("--preset", presets, "chirp preset(s) rc1..rc4");
  contour->add_option("--speed", speed, "forward speed, m/s");
  contour->add_option("--velocity", velocity, "velocity vector x y z, m/s")->expected(3);
  contour->add_option("--spacing-deg", spacing, "grid spacing, deg");
  contour->add_option("--fov-deg", contour_fov, "half field of view, deg");

  CLI::App* alias = app.add_subcommand("alias-region", "aliased field-of-view region");
  add_common(alias);
  alias->add_option("--preset", preset, "chirp preset rc1..rc4");
  alias->add_option("--speed", speed, "forward speed, m/s");
  alias->add_option("--velocity", velocity, "velocity vector x y z, m/s")->expected(3);
  alias->add_option("--spacing-deg", spacing, "grid spacing, deg");
  alias->add_option("--fov-deg", fov, "half field of view, deg");

  CLI::App* synth = app.add_subcommand("synth", "synthesize a dataset");
  add_common(synth);

  CLI::App* odom = app.add_subcommand("odom", "run the odometry estimator");
  add_common(odom);
  odom->add_option("--dataset", dataset_path, "dataset JSONL file")->required();

  CLI::App* eval = app.add_subcommand("eval", "trajectory error metrics");
  add_common(eval);
  eval->add_option("--estimate", estimate_path, "estimated trajectory, TUM format")->required();
  eval->add_option("--truth", truth_path, "reference trajectory, TUM format")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (noise->parsed()) {
      return cmd_noise_sim(config, preset, speed, velocity, samples, seed, fov, out);
    }
    if (approx->parsed()) {
      return cmd_approx_error(config, preset, speed, velocity, spacing, samples, seed, fov,
                              threads, out);
    }
    if (contour->parsed()) {
      return cmd_contour(config, presets, speed, velocity, spacing, contour_fov, out);
    }
    if (alias->parsed()) {
      return cmd_alias_region(config, preset, speed, velocity, spacing, fov, out);
    }
    if (synth->parsed()) return cmd_synth(config, seed, out);
    if (odom->parsed()) return cmd_odom(dataset_path, config, out);
    if (eval->parsed()) return cmd_eval(estimate_path, truth_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 2;
}
