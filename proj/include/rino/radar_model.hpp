#pragma once

#include "rino/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rino {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Chirp configuration at the table level (maxima, resolutions, FFT sizes).
/// Raw chirp fields are optional; when present they must be consistent with
/// the table values.
struct ChirpConfig {
  std::string name;
  double carrier_frequency_hz = 0.0;

  // optional raw chirp description
  std::optional<double> chirp_slope_hz_per_s;
  std::optional<double> chirp_duration_s;
  std::optional<int> chirps_per_frame;

  double max_range_m = 0.0;
  double max_doppler_mps = 0.0;
  double range_resolution_m = 0.0;
  double doppler_resolution_mps = 0.0;
  double azimuth_resolution_deg = 0.0;
  double elevation_resolution_deg = 0.0;

  int fft_bins_range = 0;
  int fft_bins_doppler = 0;
  int fft_bins_phase = 0;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct DerivedRadarProperties {
  double bin_width_range_m = 0.0;
  double bin_width_doppler_mps = 0.0;
  double bin_width_phase_rad = 0.0;
};

struct SignalQuantities {
  double beat_frequency_hz = 0.0;
  double interchirp_phase_shift_rad = 0.0;
};

struct AoaPhases {
  double w_y = 0.0;  // rad
  double w_z = 0.0;  // rad
};

struct Bearing {
  Vec3 mu = Vec3::UnitX();
};

struct RadarPoint {
  double range_m = 0.0;
  double radial_speed_mps = 0.0;
  AoaPhases phases;
  std::optional<double> snr_db;

  // simulator-only truth annotations
  std::optional<double> truth_range_m;
  std::optional<double> truth_radial_speed_mps;
  std::optional<AoaPhases> truth_phases;
  bool aliased = false;
};

struct RadarScan {
  double timestamp_s = 0.0;  // mid-chirp time
  std::vector<RadarPoint> points;
};

DerivedRadarProperties derive_properties(const ChirpConfig& cfg);

/// d = f_b c / (2 S). Requires raw chirp slope.
double range_from_beat(double beat_frequency_hz, const ChirpConfig& cfg);

/// v_r = lambda dphi / (4 pi T_c). Requires raw chirp duration.
double doppler_from_phase(double phase_shift_rad, const ChirpConfig& cfg);

AoaPhases angles_to_phases(double azimuth_rad, double elevation_rad);

/// mu = [sqrt(1 - (w_y^2 + w_z^2)/pi^2), w_y/pi, w_z/pi].
/// Throws std::domain_error if the root argument is negative.
Bearing phases_to_bearing(const AoaPhases& w);

inline double radial_speed(const Bearing& mu, const Vec3& v_radar) { return -mu.mu.dot(v_radar); }

inline Vec3 target_position(const Bearing& mu, double range_m) { return mu.mu * range_m; }

/// Nearest grid point of {offset + k*bin_width}; half-way ties toward -inf.
double quantize_to_bin(double value, double bin_width, double offset);

struct AliasResult {
  double v_measured_mps = 0.0;
  bool aliased = false;
};

/// Wraps into [-max_doppler, +max_doppler) by multiples of 2*max_doppler.
AliasResult alias_wrap(double v_true_mps, double max_doppler_mps);

/// Named presets rc1..rc4. Throws std::invalid_argument for unknown names.
ChirpConfig chirp_preset(const std::string& name);

/// Loads a chirp config from a YAML file with the snake_case table field names.
ChirpConfig load_chirp_config(const std::string& path);

}  // namespace rino
