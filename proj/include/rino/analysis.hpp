#pragma once

#include "rino/noise_model.hpp"
#include "rino/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rino {

/// Rectangular azimuth/elevation grid of one scalar per cell, row-major with
/// elevation as the row index.
struct GridResult {
  std::vector<double> azimuths_deg;
  std::vector<double> elevations_deg;
  std::vector<double> values;  // size = azimuths * elevations
  std::string config_name;
  Vec3 velocity = Vec3::Zero();
  std::string value_name;

  double at(int el_idx, int az_idx) const {
    return values[el_idx * azimuths_deg.size() + az_idx];
  }
};

/// Writes "azimuth_deg,elevation_deg,<value_name>" rows, row-major.
void write_grid_csv(const GridResult& grid, const std::string& path);

struct NoiseSimResult {
  std::vector<double> samples;  // Doppler residual errors, m/s
  double bin_width_doppler = 0.0;
  double sample_mean = 0.0;
  double sample_std = 0.0;
  double predicted_std = 0.0;  // first-order model averaged over the FOV
};

/// Doppler residual error distribution from quantized AoA and Doppler at a
/// fixed ego velocity, angles drawn uniformly over the FOV.
NoiseSimResult noise_sim(const ChirpConfig& cfg, const Vec3& velocity, std::int64_t samples,
                         std::uint64_t seed, double fov_deg = 60.0);

/// Per-cell |MC std - linearized std| of the AoA-induced Doppler noise
/// contribution (the first-order approximation error).
GridResult approx_error_grid(const ChirpConfig& cfg, const Vec3& velocity,
                             double spacing_deg, std::int64_t samples_per_cell,
                             std::uint64_t seed, double fov_deg = 60.0, int threads = 1);

/// Per-cell AoA noise contribution std sqrt(v^T Sigma_mu v).
GridResult contour_grid(const ChirpConfig& cfg, const Vec3& velocity, double spacing_deg,
                        double fov_deg = 90.0);

struct ContourSummary {
  bool level_set_exists = false;   // both sides of the sigma_vr level present
  double below_fraction = 0.0;     // cells where AoA contribution < sigma_vr
  double equivalent_radius_deg = 0.0;  // area-equivalent radius of that region
  double centroid_azimuth_deg = 0.0;
  double centroid_elevation_deg = 0.0;
};

ContourSummary summarize_contour(const GridResult& grid, double sigma_vr);

/// Per-cell |mu^T v| together with the aliasing threshold.
GridResult alias_region_grid(const ChirpConfig& cfg, const Vec3& velocity, double spacing_deg,
                             double fov_deg = 60.0);

/// Fraction of grid cells whose |mu^T v| exceeds the Doppler limit.
double aliased_fraction(const GridResult& grid, double max_doppler_mps);

struct ScanCountSummary {
  double nominal_mean = 0.0, nominal_std = 0.0;
  double aliased_mean = 0.0, aliased_std = 0.0;
  int scans = 0;
  /// Longest consecutive run of scans with zero nominal points, seconds.
  double longest_nominal_gap_s = 0.0;
};

ScanCountSummary summarize_scan_counts(const SimDataset& dataset);

}  // namespace rino
