#include "rino/radar_model.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <stdexcept>

namespace rino {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument("chirp config field '" + field + "': " + what);
  }
}

}  // namespace

void ChirpConfig::validate() const {
  require(carrier_frequency_hz > 0.0, "carrier_frequency", "must be positive");
  require(max_range_m > 0.0, "max_range", "must be positive");
  require(max_doppler_mps > 0.0, "max_doppler", "must be positive");
  require(range_resolution_m > 0.0, "range_resolution", "must be positive");
  require(doppler_resolution_mps > 0.0, "doppler_resolution", "must be positive");
  require(azimuth_resolution_deg > 0.0, "azimuth_resolution", "must be positive");
  require(elevation_resolution_deg > 0.0, "elevation_resolution", "must be positive");
  require(fft_bins_range >= 2 && is_power_of_two(fft_bins_range), "fft_bins_range",
          "must be a power of two >= 2");
  require(fft_bins_doppler >= 2 && is_power_of_two(fft_bins_doppler), "fft_bins_doppler",
          "must be a power of two >= 2");
  require(fft_bins_phase >= 2 && is_power_of_two(fft_bins_phase), "fft_bins_phase",
          "must be a power of two >= 2");

  // Cross-check raw chirp fields against the table values when present.
  constexpr double kTol = 0.01;
  if (chirp_slope_hz_per_s && chirp_duration_s) {
    const double dd = kSpeedOfLight / (2.0 * *chirp_slope_hz_per_s * *chirp_duration_s);
    require(std::abs(dd - range_resolution_m) <= kTol * range_resolution_m, "range_resolution",
            "inconsistent with chirp slope and duration");
  }
  if (chirp_duration_s) {
    const double vmax = wavelength() / (4.0 * *chirp_duration_s);
    require(std::abs(vmax - max_doppler_mps) <= kTol * max_doppler_mps, "max_doppler",
            "inconsistent with chirp duration");
    if (chirps_per_frame) {
      const double dv = wavelength() / (2.0 * *chirps_per_frame * *chirp_duration_s);
      require(std::abs(dv - doppler_resolution_mps) <= kTol * doppler_resolution_mps,
              "doppler_resolution", "inconsistent with chirp duration and frame size");
    }
  }
}

DerivedRadarProperties derive_properties(const ChirpConfig& cfg) {
  cfg.validate();
  DerivedRadarProperties out;
  out.bin_width_range_m = cfg.max_range_m / cfg.fft_bins_range;
  out.bin_width_doppler_mps = 2.0 * cfg.max_doppler_mps / cfg.fft_bins_doppler;
  out.bin_width_phase_rad = 2.0 * M_PI / cfg.fft_bins_phase;
  return out;
}

double range_from_beat(double beat_frequency_hz, const ChirpConfig& cfg) {
  if (beat_frequency_hz < 0.0) {
    throw std::invalid_argument("beat frequency must be non-negative");
  }
  if (!cfg.chirp_slope_hz_per_s) {
    throw std::invalid_argument("chirp config '" + cfg.name + "' is missing chirp_slope");
  }
  return beat_frequency_hz * kSpeedOfLight / (2.0 * *cfg.chirp_slope_hz_per_s);
}

double doppler_from_phase(double phase_shift_rad, const ChirpConfig& cfg) {
  if (std::abs(phase_shift_rad) > M_PI + 1e-12) {
    throw std::invalid_argument("inter-chirp phase shift must lie in [-pi, pi]");
  }
  if (!cfg.chirp_duration_s) {
    throw std::invalid_argument("chirp config '" + cfg.name + "' is missing chirp_duration");
  }
  return cfg.wavelength() * phase_shift_rad / (4.0 * M_PI * *cfg.chirp_duration_s);
}

AoaPhases angles_to_phases(double azimuth_rad, double elevation_rad) {
  if (std::abs(azimuth_rad) >= M_PI / 2 || std::abs(elevation_rad) >= M_PI / 2) {
    throw std::domain_error("angles outside the front hemisphere");
  }
  AoaPhases w;
  w.w_y = M_PI * std::sin(azimuth_rad) * std::cos(elevation_rad);
  w.w_z = M_PI * std::sin(elevation_rad);
  return w;
}

Bearing phases_to_bearing(const AoaPhases& w) {
  const double arg = 1.0 - (w.w_y * w.w_y + w.w_z * w.w_z) / (M_PI * M_PI);
  if (arg < 0.0) {
    throw std::domain_error("phase pair outside the unit disk; filter edge-of-FOV points");
  }
  Bearing b;
  b.mu = Vec3(std::sqrt(arg), w.w_y / M_PI, w.w_z / M_PI);
  return b;
}

double quantize_to_bin(double value, double bin_width, double offset) {
  if (bin_width <= 0.0) {
    throw std::invalid_argument("bin width must be positive");
  }
  const double k = std::ceil((value - offset) / bin_width - 0.5);
  return offset + k * bin_width;
}

AliasResult alias_wrap(double v_true_mps, double max_doppler_mps) {
  if (max_doppler_mps <= 0.0) {
    throw std::invalid_argument("max doppler must be positive");
  }
  const double span = 2.0 * max_doppler_mps;
  AliasResult out;
  out.v_measured_mps =
      v_true_mps - span * std::floor((v_true_mps + max_doppler_mps) / span);
  out.aliased = out.v_measured_mps != v_true_mps;
  return out;
}

ChirpConfig chirp_preset(const std::string& name) {
  ChirpConfig c;
  c.name = name;
  if (name == "rc1") {
    c.carrier_frequency_hz = 60e9;
    c.max_range_m = 20.013;
    c.max_doppler_mps = 3.995;
    c.range_resolution_m = 0.078;
    c.doppler_resolution_mps = 0.133;
    c.azimuth_resolution_deg = 29.0;
    c.elevation_resolution_deg = 29.0;
    c.fft_bins_range = 256;
    c.fft_bins_doppler = 64;
    c.fft_bins_phase = 64;
  } else if (name == "rc2") {
    c.carrier_frequency_hz = 60e9;
    c.max_range_m = 13.713;
    c.max_doppler_mps = 3.148;
    c.range_resolution_m = 0.214;
    c.doppler_resolution_mps = 0.049;
    c.azimuth_resolution_deg = 29.0;
    c.elevation_resolution_deg = 29.0;
    c.fft_bins_range = 64;
    c.fft_bins_doppler = 128;
    c.fft_bins_phase = 64;
  } else if (name == "rc3") {
    c.carrier_frequency_hz = 77e9;
    c.max_range_m = 25.0;
    c.max_doppler_mps = 3.879;
    c.range_resolution_m = 0.195;
    c.doppler_resolution_mps = 0.065;
    c.azimuth_resolution_deg = 29.0;
    c.elevation_resolution_deg = 38.0;
    c.fft_bins_range = 128;
    c.fft_bins_doppler = 128;
    c.fft_bins_phase = 64;
  } else if (name == "rc4") {
    c.carrier_frequency_hz = 77e9;
    c.max_range_m = 62.495;
    c.max_doppler_mps = 2.021;
    c.range_resolution_m = 0.244;
    c.doppler_resolution_mps = 0.126;
    c.azimuth_resolution_deg = 14.0;
    c.elevation_resolution_deg = 57.0;
    c.fft_bins_range = 256;
    c.fft_bins_doppler = 32;
    c.fft_bins_phase = 64;
  } else {
    throw std::invalid_argument("unknown chirp preset '" + name + "'");
  }
  c.validate();
  return c;
}

ChirpConfig load_chirp_config(const std::string& path) {
  YAML::Node node = YAML::LoadFile(path);
  if (node["preset"]) {
    return chirp_preset(node["preset"].as<std::string>());
  }
  ChirpConfig c;
  c.name = node["name"] ? node["name"].as<std::string>() : path;
  c.carrier_frequency_hz = node["carrier_frequency"].as<double>();
  if (node["chirp_slope"]) c.chirp_slope_hz_per_s = node["chirp_slope"].as<double>();
  if (node["chirp_duration"]) c.chirp_duration_s = node["chirp_duration"].as<double>();
  if (node["chirps_per_frame"]) c.chirps_per_frame = node["chirps_per_frame"].as<int>();
  c.max_range_m = node["max_range"].as<double>();
  c.max_doppler_mps = node["max_doppler"].as<double>();
  c.range_resolution_m = node["range_resolution"].as<double>();
  c.doppler_resolution_mps = node["doppler_resolution"].as<double>();
  c.azimuth_resolution_deg = node["azimuth_resolution"].as<double>();
  c.elevation_resolution_deg = node["elevation_resolution"].as<double>();
  c.fft_bins_range = node["fft_bins_range"].as<int>();
  c.fft_bins_doppler = node["fft_bins_doppler"].as<int>();
  c.fft_bins_phase = node["fft_bins_phase"].as<int>();
  c.validate();
  return c;
}

}  // namespace rino
