#include "rino/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

namespace rino {

namespace {

std::vector<double> linspace_grid(double fov_deg, double spacing_deg) {
  std::vector<double> out;
  for (double a = -fov_deg; a <= fov_deg + 1e-9; a += spacing_deg) out.push_back(a);
  return out;
}

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std_dev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

std::uint64_t cell_seed(std::uint64_t seed, int row, int col) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
  h ^= (static_cast<std::uint64_t>(row) + 1) * 0xbf58476d1ce4e5b9ull;
  h ^= (static_cast<std::uint64_t>(col) + 1) * 0x94d049bb133111ebull;
  return h;
}

}  // namespace

void write_grid_csv(const GridResult& grid, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.precision(9);
  os << "azimuth_deg,elevation_deg," << grid.value_name << "\n";
  for (std::size_t e = 0; e < grid.elevations_deg.size(); ++e) {
    for (std::size_t a = 0; a < grid.azimuths_deg.size(); ++a) {
      os << grid.azimuths_deg[a] << ',' << grid.elevations_deg[e] << ','
         << grid.values[e * grid.azimuths_deg.size() + a] << '\n';
    }
  }
}

NoiseSimResult noise_sim(const ChirpConfig& cfg, const Vec3& velocity, std::int64_t samples,
                         std::uint64_t seed, double fov_deg) {
  cfg.validate();
  const DerivedRadarProperties props = derive_properties(cfg);
  const RadarNoise noise = RadarNoise::from_config(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-deg2rad(fov_deg), deg2rad(fov_deg));

  NoiseSimResult out;
  out.bin_width_doppler = props.bin_width_doppler_mps;
  out.samples.reserve(samples);
  Welford err_acc;
  Welford var_acc;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double az = angle(rng);
    const double el = angle(rng);
    const AoaPhases w = angles_to_phases(az, el);
    const AoaPhases w_meas{quantize_to_bin(w.w_y, props.bin_width_phase_rad, 0.0),
                           quantize_to_bin(w.w_z, props.bin_width_phase_rad, 0.0)};
    Bearing mu_true, mu_meas;
    try {
      mu_true = phases_to_bearing(w);
      mu_meas = phases_to_bearing(w_meas);
    } catch (const std::exception&) {
      --i;  // phase pair outside the bearing domain; redraw
      continue;
    }
    const double vr_true = radial_speed(mu_true, velocity);
    const double vr_meas = quantize_to_bin(vr_true, props.bin_width_doppler_mps, 0.0);
    const double e = radial_speed(mu_meas, velocity) - vr_meas;
    out.samples.push_back(e);
    err_acc.add(e);
    try {
      const BearingCovariance cov = bearing_covariance(w_meas, noise.phase);
      var_acc.add(doppler_residual_variance(mu_meas, velocity, noise.doppler, cov));
    } catch (const std::exception&) {
    }
  }
  out.sample_mean = err_acc.mean;
  out.sample_std = err_acc.std_dev();
  out.predicted_std = var_acc.n > 0 ? std::sqrt(var_acc.mean) : 0.0;
  return out;
}

GridResult approx_error_grid(const ChirpConfig& cfg, const Vec3& velocity, double spacing_deg,
                             std::int64_t samples_per_cell, std::uint64_t seed, double fov_deg,
                             int threads) {
  cfg.validate();
  const DerivedRadarProperties props = derive_properties(cfg);
  const RadarNoise noise = RadarNoise::from_config(cfg);

  GridResult grid;
  grid.azimuths_deg = linspace_grid(fov_deg, spacing_deg);
  grid.elevations_deg = linspace_grid(fov_deg, spacing_deg);
  grid.values.assign(grid.azimuths_deg.size() * grid.elevations_deg.size(), 0.0);
  grid.config_name = cfg.name;
  grid.velocity = velocity;
  grid.value_name = "abs_std_error_mps";

  const int rows = static_cast<int>(grid.elevations_deg.size());
  const int cols = static_cast<int>(grid.azimuths_deg.size());
  const double half_bin = props.bin_width_phase_rad / 2.0;

  const auto run_rows = [&](int row_begin, int row_end) {
    for (int r = row_begin; r < row_end; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double az = deg2rad(grid.azimuths_deg[c]);
        const double el = deg2rad(grid.elevations_deg[r]);
        AoaPhases w_center;
        Bearing mu_meas;
        Eigen::Matrix<double, 3, 2> jac;
        try {
          w_center = angles_to_phases(az, el);
          mu_meas = phases_to_bearing(w_center);
          jac = bearing_jacobian(w_center);
        } catch (const std::exception&) {
          grid.values[r * cols + c] = std::nan("");
          continue;
        }
        // Linearized AoA contribution.
        const BearingCovariance cov = bearing_covariance(w_center, noise.phase);
        const double lin_std =
            std::sqrt(std::max(0.0, velocity.dot(cov.sigma_mu * velocity)));

        // MC: true phases uniform within the quantization bin of the cell.
        std::mt19937_64 rng(cell_seed(seed, r, c));
        std::uniform_real_distribution<double> jitter(-half_bin, half_bin);
        Welford acc;
        for (std::int64_t i = 0; i < samples_per_cell; ++i) {
          const AoaPhases w_true{w_center.w_y + jitter(rng), w_center.w_z + jitter(rng)};
          Bearing mu_true;
          try {
            mu_true = phases_to_bearing(w_true);
          } catch (const std::exception&) {
            continue;
          }
          acc.add((mu_true.mu - mu_meas.mu).dot(velocity));
        }
        grid.values[r * cols + c] = std::abs(acc.std_dev() - lin_std);
      }
    }
  };

  if (threads <= 1) {
    run_rows(0, rows);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (rows + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(rows, lo + chunk);
      if (lo < hi) pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return grid;
}

GridResult contour_grid(const ChirpConfig& cfg, const Vec3& velocity, double spacing_deg,
                        double fov_deg) {
  cfg.validate();
  const RadarNoise noise = RadarNoise::from_config(cfg);
  GridResult grid;
  grid.azimuths_deg = linspace_grid(fov_deg, spacing_deg);
  grid.elevations_deg = linspace_grid(fov_deg, spacing_deg);
  grid.values.assign(grid.azimuths_deg.size() * grid.elevations_deg.size(),
                     std::nan(""));
  grid.config_name = cfg.name;
  grid.velocity = velocity;
  grid.value_name = "aoa_noise_std_mps";
  const int cols = static_cast<int>(grid.azimuths_deg.size());
  for (std::size_t r = 0; r < grid.elevations_deg.size(); ++r) {
    for (int c = 0; c < cols; ++c) {
      try {
        const AoaPhases w = angles_to_phases(deg2rad(grid.azimuths_deg[c]),
                                             deg2rad(grid.elevations_deg[r]));
        const BearingCovariance cov = bearing_covariance(w, noise.phase);
        grid.values[r * cols + c] =
            std::sqrt(std::max(0.0, velocity.dot(cov.sigma_mu * velocity)));
      } catch (const std::exception&) {
      }
    }
  }
  return grid;
}

ContourSummary summarize_contour(const GridResult& grid, double sigma_vr) {
  ContourSummary s;
  const int cols = static_cast<int>(grid.azimuths_deg.size());
  const int rows = static_cast<int>(grid.elevations_deg.size());
  int below = 0, above = 0;
  double az_sum = 0.0, el_sum = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = grid.values[r * cols + c];
      if (std::isnan(v)) continue;
      if (v < sigma_vr) {
        ++below;
        az_sum += grid.azimuths_deg[c];
        el_sum += grid.elevations_deg[r];
      } else {
        ++above;
      }
    }
  }
  const int valid = below + above;
  if (valid == 0) return s;
  s.level_set_exists = below > 0 && above > 0;
  s.below_fraction = static_cast<double>(below) / valid;
  if (below > 0) {
    s.centroid_azimuth_deg = az_sum / below;
    s.centroid_elevation_deg = el_sum / below;
    const double spacing = cols > 1 ? grid.azimuths_deg[1] - grid.azimuths_deg[0] : 1.0;
    s.equivalent_radius_deg = std::sqrt(below * spacing * spacing / M_PI);
  }
  return s;
}

GridResult alias_region_grid(const ChirpConfig& cfg, const Vec3& velocity, double spacing_deg,
                             double fov_deg) {
  cfg.validate();
  GridResult grid;
  grid.azimuths_deg = linspace_grid(fov_deg, spacing_deg);
  grid.elevations_deg = linspace_grid(fov_deg, spacing_deg);
  grid.values.assign(grid.azimuths_deg.size() * grid.elevations_deg.size(), 0.0);
  grid.config_name = cfg.name;
  grid.velocity = velocity;
  grid.value_name = "abs_radial_speed_mps";
  const int cols = static_cast<int>(grid.azimuths_deg.size());
  for (std::size_t r = 0; r < grid.elevations_deg.size(); ++r) {
    for (int c = 0; c < cols; ++c) {
      const double az = deg2rad(grid.azimuths_deg[c]);
      const double el = deg2rad(grid.elevations_deg[r]);
      const Vec3 mu(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      grid.values[r * cols + c] = std::abs(mu.dot(velocity));
    }
  }
  return grid;
}

double aliased_fraction(const GridResult& grid, double max_doppler_mps) {
  int aliased = 0, valid = 0;
  for (double v : grid.values) {
    if (std::isnan(v)) continue;
    ++valid;
    if (v > max_doppler_mps) ++aliased;
  }
  return valid > 0 ? static_cast<double>(aliased) / valid : 0.0;
}

ScanCountSummary summarize_scan_counts(const SimDataset& dataset) {
  ScanCountSummary s;
  Welford nominal, aliased;
  double gap_start = -1.0;
  double prev_t = 0.0;
  for (const RadarScan& scan : dataset.radar) {
    int n_aliased = 0;
    for (const RadarPoint& p : scan.points) n_aliased += p.aliased ? 1 : 0;
    const int n_nominal = static_cast<int>(scan.points.size()) - n_aliased;
    nominal.add(n_nominal);
    aliased.add(n_aliased);
    if (n_nominal == 0) {
      if (gap_start < 0.0) gap_start = prev_t;
      s.longest_nominal_gap_s = std::max(s.longest_nominal_gap_s,
                                         scan.timestamp_s - gap_start);
    } else {
      gap_start = -1.0;
    }
    prev_t = scan.timestamp_s;
  }
  s.scans = static_cast<int>(nominal.n);
  s.nominal_mean = nominal.mean;
  s.nominal_std = nominal.std_dev();
  s.aliased_mean = aliased.mean;
  s.aliased_std = aliased.std_dev();
  return s;
}

}  // namespace rino
