#include "rino/estimator.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rino {

namespace {

constexpr Key kExtrinsicsKey = 1ull << 40;

Vec3 mean_of(const std::vector<ImuRecord>& buf, bool gyro) {
  Vec3 sum = Vec3::Zero();
  for (const ImuRecord& r : buf) sum += gyro ? r.angular_rate : r.specific_force;
  return sum / static_cast<double>(buf.size());
}

Vec3 std_of(const std::vector<ImuRecord>& buf, bool gyro, const Vec3& mean) {
  Vec3 acc = Vec3::Zero();
  for (const ImuRecord& r : buf) {
    const Vec3 d = (gyro ? r.angular_rate : r.specific_force) - mean;
    acc += d.cwiseProduct(d);
  }
  return (acc / static_cast<double>(std::max<std::size_t>(buf.size() - 1, 1))).cwiseSqrt();
}

}  // namespace

InitializationResult initialize_at_rest(const std::vector<ImuRecord>& buffer,
                                        const EstimatorConfig& cfg) {
  if (buffer.size() < 2 ||
      buffer.back().t - buffer.front().t < cfg.init_duration_s) {
    throw std::runtime_error("initialization buffer too short");
  }
  const Vec3 gyro_mean = mean_of(buffer, true);
  const Vec3 accel_mean = mean_of(buffer, false);
  const Vec3 gyro_std = std_of(buffer, true, gyro_mean);
  const Vec3 accel_std = std_of(buffer, false, accel_mean);
  if (gyro_std.maxCoeff() > cfg.init_motion_gyro_threshold ||
      accel_std.maxCoeff() > cfg.init_motion_accel_threshold) {
    throw std::runtime_error("motion detected during at-rest initialization");
  }

  // At rest the specific force reads R^T (0,0,g); recover roll/pitch from its
  // direction, leave yaw at zero.
  const double roll = std::atan2(accel_mean.y(), accel_mean.z());
  const double pitch = std::atan2(-accel_mean.x(),
                                  std::hypot(accel_mean.y(), accel_mean.z()));

  InitializationResult out;
  out.state.attitude = rot_zyx(0.0, pitch, roll);
  out.state.gyro_bias = gyro_mean;

  // Roll/pitch uncertainty inflated by the uncompensated accelerometer bias.
  const double sigma_rp = std::hypot(cfg.prior_sigma_rot, cfg.prior_sigma_ba / 9.81);
  out.prior_sqrt_info = NavPriorFactor::sqrt_info_from_sigmas(
      sigma_rp, cfg.prior_sigma_pos, cfg.prior_sigma_vel, cfg.prior_sigma_ba,
      cfg.prior_sigma_bg, cfg.prior_sigma_bb);
  // Yaw is a gauge direction; anchor it with the un-inflated sigma.
  out.prior_sqrt_info(2, 2) = 1.0 / cfg.prior_sigma_rot;
  return out;
}

std::vector<StampedPose> propagate_high_rate(const NavState& state, double t0,
                                             const std::vector<ImuRecord>& imu,
                                             const Vec3& gravity) {
  std::vector<StampedPose> out;
  Mat3 r = state.attitude;
  Vec3 p = state.position;
  Vec3 v = state.velocity;
  double t = t0;
  bool have_prev = false;
  ImuRecord prev;
  out.push_back({t, r, p, v});
  for (const ImuRecord& rec : imu) {
    if (rec.t <= t) {
      prev = rec;
      have_prev = true;
      continue;
    }
    const ImuRecord& base = have_prev ? prev : rec;
    const double dt = rec.t - t;
    const Vec3 w = 0.5 * (base.angular_rate + rec.angular_rate) - state.gyro_bias;
    const Vec3 f = 0.5 * (base.specific_force + rec.specific_force) - state.accel_bias;
    const Vec3 a = r * f + gravity;
    p += v * dt + 0.5 * a * dt * dt;
    v += a * dt;
    r = r * so3_exp(w * dt);
    t = rec.t;
    prev = rec;
    have_prev = true;
    out.push_back({t, r, p, v});
  }
  return out;
}

Estimator::Estimator(EstimatorConfig cfg)
    : cfg_(std::move(cfg)),
      radar_noise_(RadarNoise::from_config(cfg_.chirp)),
      map_(cfg_.map_voxel_m, cfg_.map_min_neighbors) {
  cfg_.chirp.validate();
  extrinsics_key_ = kExtrinsicsKey;
}

const NavState& Estimator::current_state() const {
  if (node_keys_.empty()) throw std::runtime_error("estimator not initialized");
  return graph_.values().as<NavStateVariable>(node_keys_.back()).state();
}

Extrinsics Estimator::current_extrinsics() const {
  if (cfg_.estimate_extrinsics && graph_.values().contains(extrinsics_key_)) {
    return graph_.values().as<ExtrinsicsVariable>(extrinsics_key_).value();
  }
  return cfg_.extrinsics;
}

void Estimator::add_imu(const ImuRecord& rec) {
  imu_buffer_.push_back(rec);
  if (!initialized_) init_buffer_.push_back(rec);
}

void Estimator::add_baro(const BaroRecord& rec) { baro_buffer_.push_back(rec); }

ImuRecord Estimator::interpolate_imu(double t) const {
  if (imu_buffer_.empty()) throw std::runtime_error("empty IMU buffer");
  if (t <= imu_buffer_.front().t) return {t, imu_buffer_.front().angular_rate,
                                          imu_buffer_.front().specific_force};
  if (t >= imu_buffer_.back().t) return {t, imu_buffer_.back().angular_rate,
                                         imu_buffer_.back().specific_force};
  auto hi = std::lower_bound(imu_buffer_.begin(), imu_buffer_.end(), t,
                             [](const ImuRecord& r, double tv) { return r.t < tv; });
  auto lo = std::prev(hi);
  const double a = (t - lo->t) / (hi->t - lo->t);
  return {t, (1.0 - a) * lo->angular_rate + a * hi->angular_rate,
          (1.0 - a) * lo->specific_force + a * hi->specific_force};
}

std::vector<ImuRecord> Estimator::take_imu_segment(double t_begin, double t_end) {
  std::vector<ImuRecord> seg;
  seg.push_back(interpolate_imu(t_begin));
  for (const ImuRecord& r : imu_buffer_) {
    if (r.t > t_begin + 1e-12 && r.t < t_end - 1e-12) seg.push_back(r);
  }
  seg.push_back(interpolate_imu(t_end));
  return seg;
}

void Estimator::refresh_scan_noise() {
  const auto active = [this](const std::shared_ptr<Factor>& f) {
    const auto& fs = graph_.factors();
    return std::find(fs.begin(), fs.end(), f) != fs.end();
  };
  for (auto& f : doppler_factors_) {
    if (active(f)) f->update_noise(graph_.values());
  }
  for (auto& f : registration_factors_) {
    if (active(f)) f->update_noise(graph_.values());
  }
}

void Estimator::rebuild_drifted_preintegrations() {
  for (Edge& e : edges_) {
    if (!graph_.values().contains(e.from) || !graph_.values().contains(e.to)) continue;
    const NavState& xi = graph_.values().as<NavStateVariable>(e.from).state();
    if (!e.pim->bias_drift_exceeds(xi.gyro_bias, xi.accel_bias)) continue;
    auto pim = std::make_shared<PreintegratedImu>(cfg_.imu_noise, xi.gyro_bias, xi.accel_bias);
    pim->integrate_segment(e.segment);
    auto factor = std::make_shared<ImuFactor>(e.from, e.to, pim, kGravity);
    graph_.remove_factor(e.factor);
    graph_.add_factor(factor);
    e.pim = pim;
    e.factor = factor;
  }
}

void Estimator::try_initialize(double scan_time) {
  if (init_buffer_.size() < 2 ||
      init_buffer_.back().t - init_buffer_.front().t < cfg_.init_duration_s) {
    return;
  }
  const InitializationResult init = initialize_at_rest(init_buffer_, cfg_);

  const Key key = next_key_++;
  graph_.add_variable(key, std::make_unique<NavStateVariable>(init.state));
  graph_.add_factor(std::make_shared<NavPriorFactor>(key, init.state, init.prior_sqrt_info));
  node_keys_.push_back(key);
  node_times_[key] = scan_time;
  last_node_time_ = scan_time;

  if (cfg_.estimate_extrinsics) {
    graph_.add_variable(extrinsics_key_,
                        std::make_unique<ExtrinsicsVariable>(cfg_.extrinsics));
    Values lin;
    lin.insert(extrinsics_key_, std::make_unique<ExtrinsicsVariable>(cfg_.extrinsics));
    Eigen::MatrixXd sqrt_info = Eigen::MatrixXd::Identity(6, 6) / 0.05;
    graph_.add_factor(std::make_shared<MarginalPriorFactor>(
        std::vector<Key>{extrinsics_key_}, std::move(lin), sqrt_info,
        Eigen::VectorXd::Zero(6)));
  }
  initialized_ = true;
  init_buffer_.clear();
}

std::optional<StampedPose> Estimator::add_radar(const RadarScan& scan) {
  if (!initialized_) {
    try_initialize(scan.timestamp_s);
    if (!initialized_) return std::nullopt;
    process_scan(scan);
  } else {
    if (scan.timestamp_s <= last_node_time_) {
      throw std::runtime_error("radar scans must have increasing timestamps");
    }
    process_scan(scan);
  }
  const NavState& x = current_state();
  return StampedPose{last_node_time_, x.attitude, x.position, x.velocity};
}

void Estimator::process_scan(const RadarScan& scan) {
  const double t_k = scan.timestamp_s;
  Key node = node_keys_.back();

  // New node connected through the preintegrated IMU segment, except for the
  // very first scan which reuses the initialization node.
  if (t_k > last_node_time_ + 1e-9) {
    const Key prev = node_keys_.back();
    const NavState& xi = graph_.values().as<NavStateVariable>(prev).state();
    auto pim = std::make_shared<PreintegratedImu>(cfg_.imu_noise, xi.gyro_bias, xi.accel_bias);
    std::vector<ImuRecord> segment = take_imu_segment(last_node_time_, t_k);
    pim->integrate_segment(segment);

    NavState xj = xi;
    const double dt = pim->delta_time();
    xj.attitude = xi.attitude * pim->delta_rotation();
    xj.position = xi.position + xi.velocity * dt + 0.5 * kGravity * dt * dt +
                  xi.attitude * pim->delta_position();
    xj.velocity = xi.velocity + kGravity * dt + xi.attitude * pim->delta_velocity();

    node = next_key_++;
    graph_.add_variable(node, std::make_unique<NavStateVariable>(xj));
    auto factor = std::make_shared<ImuFactor>(prev, node, pim, kGravity);
    graph_.add_factor(factor);
    edges_.push_back({prev, node, std::move(segment), factor, pim});
    node_keys_.push_back(node);
    node_times_[node] = t_k;
    last_node_time_ = t_k;
  }

  const std::optional<Key> extr_key =
      cfg_.estimate_extrinsics ? std::optional<Key>(extrinsics_key_) : std::nullopt;
  const Extrinsics extr = current_extrinsics();

  // Doppler factor over the validity-filtered scan; keep radar-frame
  // positions alongside for the post-optimization map update.
  std::vector<DopplerScanFactor::Point> dop_points;
  std::vector<Vec3> radar_positions;
  for (const RadarPoint& p : scan.points) {
    Bearing mu;
    try {
      mu = phases_to_bearing(p.phases);
    } catch (const std::exception&) {
      continue;  // edge-of-FOV phase pair, bearing undefined
    }
    BearingCovariance cov;
    try {
      cov = bearing_covariance(p.phases, radar_noise_.phase);
    } catch (const std::exception&) {
      continue;
    }
    dop_points.push_back({mu, p.radial_speed_mps, cov});
    radar_positions.push_back(target_position(mu, p.range_m));
  }

  std::shared_ptr<DopplerScanFactor> dop_factor;
  if (!dop_points.empty()) {
    const ImuRecord at_scan = interpolate_imu(t_k);
    DopplerScanParams params;
    params.doppler_quant = radar_noise_.doppler;
    params.phase_noise = radar_noise_.phase;
    params.angle_noise_on = cfg_.angle_noise_on;
    params.gyro_term_on = cfg_.gyro_term_on;
    params.avg_rate_covariance =
        Mat3::Identity() * cfg_.imu_noise.gyro_noise_density *
        cfg_.imu_noise.gyro_noise_density * 200.0;  // single-sample average
    params.loss = RobustLoss::cauchy(cfg_.cauchy_scale);
    dop_factor = std::make_shared<DopplerScanFactor>(node, extr_key, extr, dop_points,
                                                     at_scan.angular_rate, params);
    dop_factor->update_noise(graph_.values());
    graph_.add_factor(dop_factor);
    doppler_factors_.push_back(dop_factor);
  }

  // Registration against the accumulated static map.
  if (cfg_.registration_on && map_.size() > 0 && !dop_points.empty()) {
    const NavState& xj = graph_.values().as<NavStateVariable>(node).state();
    std::vector<RegistrationScanFactor::Point> reg_points;
    for (std::size_t i = 0; i < dop_points.size(); ++i) {
      const Vec3 world =
          xj.attitude * (extr.rotation * radar_positions[i] + extr.lever_arm) + xj.position;
      const auto stats = map_.radius_neighbors(world, cfg_.map_radius_m);
      if (!stats) continue;
      RegistrationScanFactor::Point rp;
      rp.bearing = dop_points[i].bearing;
      rp.range = radar_positions[i].norm();
      rp.bearing_cov = dop_points[i].bearing_cov;
      rp.neighborhood_centroid = stats->centroid;
      rp.neighborhood_cov = stats->covariance;
      reg_points.push_back(rp);
    }
    if (!reg_points.empty()) {
      RegistrationScanParams params;
      params.range_quant = radar_noise_.range;
      params.phase_noise = radar_noise_.phase;
      auto factor = std::make_shared<RegistrationScanFactor>(node, extr_key, extr,
                                                             std::move(reg_points), params);
      factor->update_noise(graph_.values());
      graph_.add_factor(factor);
      registration_factors_.push_back(factor);
    }
  }

  // Barometer nearest the scan time.
  if (cfg_.baro_on && !baro_buffer_.empty()) {
    const BaroRecord* best = nullptr;
    for (const BaroRecord& b : baro_buffer_) {
      if (b.t > t_k + 0.5 / 50.0) break;
      if (!best || std::abs(b.t - t_k) < std::abs(best->t - t_k)) best = &b;
    }
    if (best) {
      graph_.add_factor(std::make_shared<BaroFactor>(node, best->pressure_pa,
                                                     cfg_.baro_sigma_m,
                                                     RobustLoss::huber(cfg_.huber_scale)));
    }
    while (!baro_buffer_.empty() && baro_buffer_.front().t <= t_k) baro_buffer_.pop_front();
  }

  OptimizeOptions opts;
  opts.max_iterations = cfg_.lm_iterations;
  opts.on_iteration = [this] { refresh_scan_noise(); };
  graph_.optimize(opts);
  rebuild_drifted_preintegrations();

  // Static-point selection at the optimized estimate feeds the map.
  if (dop_factor) {
    refresh_scan_noise();
    const Eigen::VectorXd raw = dop_factor->raw_residuals(graph_.values());
    const NavState& xj = graph_.values().as<NavStateVariable>(node).state();
    const Extrinsics ext_now = current_extrinsics();
    std::vector<Vec3> static_world;
    for (int i = 0; i < raw.size(); ++i) {
      if (std::abs(raw(i)) / dop_factor->sigmas()[i] >= cfg_.kappa_static) continue;
      static_world.push_back(
          xj.attitude * (ext_now.rotation * radar_positions[i] + ext_now.lever_arm) +
          xj.position);
    }
    map_.insert(static_world);
  }

  // Slide the window.
  std::vector<Key> drop;
  while (!node_keys_.empty() && node_times_[node_keys_.front()] < t_k - cfg_.lag_s) {
    drop.push_back(node_keys_.front());
    node_times_.erase(node_keys_.front());
    node_keys_.erase(node_keys_.begin());
  }
  if (!drop.empty()) {
    graph_.marginalize(drop);
    const auto dropped = [&drop](Key k) {
      return std::find(drop.begin(), drop.end(), k) != drop.end();
    };
    edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                                [&](const Edge& e) { return dropped(e.from); }),
                 edges_.end());
    const auto& live = graph_.factors();
    const auto gone = [&live](const std::shared_ptr<Factor>& f) {
      return std::find(live.begin(), live.end(), f) == live.end();
    };
    doppler_factors_.erase(
        std::remove_if(doppler_factors_.begin(), doppler_factors_.end(), gone),
        doppler_factors_.end());
    registration_factors_.erase(
        std::remove_if(registration_factors_.begin(), registration_factors_.end(), gone),
        registration_factors_.end());
  }

  // Keep a short IMU tail for boundary interpolation and high-rate output.
  while (imu_buffer_.size() > 2 && imu_buffer_[1].t <= last_node_time_) {
    imu_buffer_.pop_front();
  }
}

std::vector<StampedPose> Estimator::high_rate_since_last_node() const {
  std::vector<ImuRecord> tail(imu_buffer_.begin(), imu_buffer_.end());
  return propagate_high_rate(current_state(), last_node_time_, tail);
}

Eigen::MatrixXd Estimator::latest_covariance() const {
  if (node_keys_.empty()) throw std::runtime_error("estimator not initialized");
  return graph_.marginal_covariance(node_keys_.back());
}

EstimatorConfig load_estimator_config(const std::string& path) {
  const YAML::Node root = YAML::LoadFile(path);
  EstimatorConfig cfg;
  if (root["chirp"]) {
    const YAML::Node c = root["chirp"];
    if (c.IsScalar()) {
      cfg.chirp = chirp_preset(c.as<std::string>());
    } else if (c["preset"]) {
      cfg.chirp = chirp_preset(c["preset"].as<std::string>());
    }
  }
  const auto get = [&root](const char* name, double fallback) {
    return root[name] ? root[name].as<double>() : fallback;
  };
  const auto get_flag = [&root](const char* name, bool fallback) {
    return root[name] ? root[name].as<bool>() : fallback;
  };
  cfg.lag_s = get("lag_s", cfg.lag_s);
  cfg.lm_iterations = root["lm_iterations"] ? root["lm_iterations"].as<int>()
                                            : cfg.lm_iterations;
  cfg.kappa_static = get("kappa_static", cfg.kappa_static);
  cfg.cauchy_scale = get("cauchy_scale", cfg.cauchy_scale);
  cfg.huber_scale = get("huber_scale", cfg.huber_scale);
  cfg.baro_sigma_m = get("baro_sigma_m", cfg.baro_sigma_m);
  cfg.angle_noise_on = get_flag("angle_noise_on", cfg.angle_noise_on);
  cfg.registration_on = get_flag("registration_on", cfg.registration_on);
  cfg.baro_on = get_flag("baro_on", cfg.baro_on);
  cfg.gyro_term_on = get_flag("gyro_term_on", cfg.gyro_term_on);
  cfg.estimate_extrinsics = get_flag("estimate_extrinsics", cfg.estimate_extrinsics);
  cfg.map_voxel_m = get("map_voxel_m", cfg.map_voxel_m);
  cfg.map_radius_m = get("map_radius_m", cfg.map_radius_m);
  cfg.map_min_neighbors = root["map_min_neighbors"] ? root["map_min_neighbors"].as<int>()
                                                    : cfg.map_min_neighbors;
  cfg.init_duration_s = get("init_duration_s", cfg.init_duration_s);
  cfg.imu_noise.gyro_noise_density =
      get("gyro_noise_density", cfg.imu_noise.gyro_noise_density);
  cfg.imu_noise.accel_noise_density =
      get("accel_noise_density", cfg.imu_noise.accel_noise_density);
  cfg.imu_noise.gyro_bias_rw_density =
      get("gyro_bias_rw_density", cfg.imu_noise.gyro_bias_rw_density);
  cfg.imu_noise.accel_bias_rw_density =
      get("accel_bias_rw_density", cfg.imu_noise.accel_bias_rw_density);
  cfg.imu_noise.baro_bias_rw_density =
      get("baro_bias_rw_density", cfg.imu_noise.baro_bias_rw_density);
  if (root["extrinsics"]) {
    const YAML::Node e = root["extrinsics"];
    if (e["yaw_deg"] || e["pitch_deg"] || e["roll_deg"]) {
      cfg.extrinsics.rotation =
          rot_zyx(deg2rad(e["yaw_deg"] ? e["yaw_deg"].as<double>() : 0.0),
                  deg2rad(e["pitch_deg"] ? e["pitch_deg"].as<double>() : 0.0),
                  deg2rad(e["roll_deg"] ? e["roll_deg"].as<double>() : 0.0));
    }
    if (e["lever_arm"]) {
      const YAML::Node l = e["lever_arm"];
      cfg.extrinsics.lever_arm = Vec3(l[0].as<double>(), l[1].as<double>(), l[2].as<double>());
    }
  }
  return cfg;
}

}  // namespace rino
