#include "rino/analysis.hpp"
#include "rino/dataset.hpp"
#include "rino/estimator.hpp"
#include "rino/evaluation.hpp"
#include "rino/synth_config.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rino;

namespace {

py::dict run_odometry(const std::string& dataset_path, const EstimatorConfig& cfg) {
  const SimDataset ds = read_dataset(dataset_path);
  Estimator est(cfg);
  std::vector<StampedPose> low_rate;
  std::size_t ii = 0, ib = 0;
  for (const RadarScan& scan : ds.radar) {
    while (ii < ds.imu.size() && ds.imu[ii].t <= scan.timestamp_s) est.add_imu(ds.imu[ii++]);
    while (ib < ds.baro.size() && ds.baro[ib].t <= scan.timestamp_s) est.add_baro(ds.baro[ib++]);
    if (const auto pose = est.add_radar(scan)) low_rate.push_back(*pose);
  }
  py::list poses;
  for (const StampedPose& p : low_rate) {
    py::dict d;
    d["t"] = p.t;
    d["position"] = p.position;
    d["velocity"] = p.velocity;
    d["attitude"] = p.attitude;
    poses.append(d);
  }
  py::dict out;
  out["poses"] = poses;
  out["map_points"] = est.map().size();
  return out;
}

}  // namespace

PYBIND11_MODULE(_rino, m) {
  m.doc() = "4D radar-inertial odometry core";

  py::class_<ChirpConfig>(m, "ChirpConfig")
      .def_readwrite("name", &ChirpConfig::name)
      .def_readwrite("carrier_frequency_hz", &ChirpConfig::carrier_frequency_hz)
      .def_readwrite("max_range_m", &ChirpConfig::max_range_m)
      .def_readwrite("max_doppler_mps", &ChirpConfig::max_doppler_mps)
      .def_readwrite("fft_bins_range", &ChirpConfig::fft_bins_range)
      .def_readwrite("fft_bins_doppler", &ChirpConfig::fft_bins_doppler)
      .def_readwrite("fft_bins_phase", &ChirpConfig::fft_bins_phase)
      .def("wavelength", &ChirpConfig::wavelength)
      .def("validate", &ChirpConfig::validate);

  py::class_<DerivedRadarProperties>(m, "DerivedRadarProperties")
      .def_readonly("bin_width_range_m", &DerivedRadarProperties::bin_width_range_m)
      .def_readonly("bin_width_doppler_mps", &DerivedRadarProperties::bin_width_doppler_mps)
      .def_readonly("bin_width_phase_rad", &DerivedRadarProperties::bin_width_phase_rad);

  m.def("chirp_preset", &chirp_preset, py::arg("name"));
  m.def("load_chirp_config", &load_chirp_config, py::arg("path"));
  m.def("derive_properties", &derive_properties, py::arg("config"));
  m.def("quantize_to_bin", &quantize_to_bin, py::arg("value"), py::arg("bin_width"),
        py::arg("offset"));
  m.def(
      "alias_wrap",
      [](double v, double max_doppler) {
        const AliasResult r = alias_wrap(v, max_doppler);
        return py::make_tuple(r.v_measured_mps, r.aliased);
      },
      py::arg("v_true"), py::arg("max_doppler"));
  m.def(
      "phases_to_bearing",
      [](double w_y, double w_z) { return phases_to_bearing(AoaPhases{w_y, w_z}).mu; },
      py::arg("w_y"), py::arg("w_z"));
  m.def(
      "angles_to_phases",
      [](double az, double el) {
        const AoaPhases w = angles_to_phases(az, el);
        return py::make_tuple(w.w_y, w.w_z);
      },
      py::arg("azimuth_rad"), py::arg("elevation_rad"));
  m.def(
      "bearing_covariance",
      [](double w_y, double w_z, double sigma_phase) {
        return bearing_covariance(AoaPhases{w_y, w_z}, PhaseNoise{sigma_phase, sigma_phase})
            .sigma_mu;
      },
      py::arg("w_y"), py::arg("w_z"), py::arg("sigma_phase_rad"));
  m.def(
      "doppler_residual_std",
      [](const ChirpConfig& cfg, double w_y, double w_z, const Vec3& v_radar) {
        const RadarNoise noise = RadarNoise::from_config(cfg);
        const AoaPhases w{w_y, w_z};
        const double var = doppler_residual_variance(
            phases_to_bearing(w), v_radar, noise.doppler, bearing_covariance(w, noise.phase));
        return std::sqrt(var);
      },
      py::arg("config"), py::arg("w_y"), py::arg("w_z"), py::arg("v_radar"));

  py::class_<McStatistics>(m, "McStatistics")
      .def_readonly("range_error_mean", &McStatistics::range_error_mean)
      .def_readonly("range_error_std", &McStatistics::range_error_std)
      .def_readonly("doppler_error_mean", &McStatistics::doppler_error_mean)
      .def_readonly("doppler_error_std", &McStatistics::doppler_error_std)
      .def_readonly("phase_y_error_mean", &McStatistics::phase_y_error_mean)
      .def_readonly("phase_y_error_std", &McStatistics::phase_y_error_std)
      .def_readonly("phase_z_error_mean", &McStatistics::phase_z_error_mean)
      .def_readonly("phase_z_error_std", &McStatistics::phase_z_error_std);
  m.def(
      "mc_measurement_oracle",
      [](const ChirpConfig& cfg, std::int64_t samples, std::uint64_t seed) {
        McScenario sc;
        sc.samples = samples;
        sc.seed = seed;
        return mc_measurement_oracle(cfg, sc);
      },
      py::arg("config"), py::arg("samples") = 1000000, py::arg("seed") = 0);

  py::class_<NoiseSimResult>(m, "NoiseSimResult")
      .def_readonly("samples", &NoiseSimResult::samples)
      .def_readonly("bin_width_doppler", &NoiseSimResult::bin_width_doppler)
      .def_readonly("sample_mean", &NoiseSimResult::sample_mean)
      .def_readonly("sample_std", &NoiseSimResult::sample_std)
      .def_readonly("predicted_std", &NoiseSimResult::predicted_std);
  m.def("noise_sim", &noise_sim, py::arg("config"), py::arg("velocity"), py::arg("samples"),
        py::arg("seed"), py::arg("fov_deg") = 60.0);

  py::class_<GridResult>(m, "GridResult")
      .def_readonly("azimuths_deg", &GridResult::azimuths_deg)
      .def_readonly("elevations_deg", &GridResult::elevations_deg)
      .def_readonly("values", &GridResult::values)
      .def_readonly("config_name", &GridResult::config_name)
      .def_readonly("value_name", &GridResult::value_name);
  m.def("approx_error_grid", &approx_error_grid, py::arg("config"), py::arg("velocity"),
        py::arg("spacing_deg"), py::arg("samples_per_cell"), py::arg("seed"),
        py::arg("fov_deg") = 60.0, py::arg("threads") = 1);
  m.def("contour_grid", &contour_grid, py::arg("config"), py::arg("velocity"),
        py::arg("spacing_deg"), py::arg("fov_deg") = 90.0);
  m.def("alias_region_grid", &alias_region_grid, py::arg("config"), py::arg("velocity"),
        py::arg("spacing_deg"), py::arg("fov_deg") = 60.0);
  m.def("aliased_fraction", &aliased_fraction, py::arg("grid"), py::arg("max_doppler_mps"));

  m.def(
      "synthesize_dataset",
      [](const std::string& config_path, std::uint64_t seed, const std::string& out_path) {
        const SynthConfig cfg = load_synth_config(config_path);
        const SimDataset ds = run_synth(cfg, seed);
        write_dataset(ds, out_path);
        return ds.radar.size();
      },
      py::arg("config_path"), py::arg("seed"), py::arg("out_path"));

  py::class_<EstimatorConfig>(m, "EstimatorConfig")
      .def(py::init<>())
      .def_readwrite("lag_s", &EstimatorConfig::lag_s)
      .def_readwrite("lm_iterations", &EstimatorConfig::lm_iterations)
      .def_readwrite("kappa_static", &EstimatorConfig::kappa_static)
      .def_readwrite("angle_noise_on", &EstimatorConfig::angle_noise_on)
      .def_readwrite("registration_on", &EstimatorConfig::registration_on)
      .def_readwrite("baro_on", &EstimatorConfig::baro_on);
  m.def("load_estimator_config", &load_estimator_config, py::arg("path"));
  m.def("run_odometry", &run_odometry, py::arg("dataset_path"), py::arg("config"));

  py::class_<ErrorStats>(m, "ErrorStats")
      .def_readonly("rmse", &ErrorStats::rmse)
      .def_readonly("mean", &ErrorStats::mean)
      .def_readonly("std_dev", &ErrorStats::std_dev)
      .def_readonly("max", &ErrorStats::max)
      .def_readonly("count", &ErrorStats::count);
  m.def(
      "evaluate_trajectories",
      [](const std::string& estimate_path, const std::string& truth_path) {
        const auto est = read_tum(estimate_path);
        const auto ref = read_tum(truth_path);
        return py::make_tuple(absolute_position_error(est, ref),
                              relative_position_error(est, ref));
      },
      py::arg("estimate_path"), py::arg("truth_path"));
}
