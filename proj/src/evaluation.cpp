#include "rino/evaluation.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rino {

void write_tum(const std::vector<StampedPose>& poses, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.precision(9);
  os << std::fixed;
  for (const StampedPose& p : poses) {
    Eigen::Quaterniond q(p.attitude);
    if (q.w() < 0) q.coeffs() = -q.coeffs();
    os << p.t << ' ' << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z()
       << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << ' ' << q.w() << '\n';
  }
}

std::vector<StampedPose> read_tum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open trajectory '" + path + "'");
  std::vector<StampedPose> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    StampedPose p;
    double qx, qy, qz, qw;
    if (!(ss >> p.t >> p.position.x() >> p.position.y() >> p.position.z() >> qx >> qy >>
          qz >> qw)) {
      throw std::runtime_error("malformed trajectory line " + std::to_string(line_number) +
                               " in '" + path + "'");
    }
    p.attitude = Eigen::Quaterniond(qw, qx, qy, qz).normalized().toRotationMatrix();
    out.push_back(p);
  }
  return out;
}

namespace {

struct Association {
  int est = 0;
  int ref = 0;
};

std::vector<Association> associate(const std::vector<StampedPose>& estimate,
                                   const std::vector<StampedPose>& reference,
                                   double tolerance_s) {
  std::vector<Association> out;
  int j = 0;
  for (int i = 0; i < static_cast<int>(estimate.size()); ++i) {
    const double t = estimate[i].t;
    while (j + 1 < static_cast<int>(reference.size()) &&
           std::abs(reference[j + 1].t - t) <= std::abs(reference[j].t - t)) {
      ++j;
    }
    if (std::abs(reference[j].t - t) <= tolerance_s) out.push_back({i, j});
  }
  return out;
}

ErrorStats stats_from_errors(const std::vector<double>& errors) {
  ErrorStats s;
  s.count = static_cast<int>(errors.size());
  if (errors.empty()) return s;
  double sum = 0.0, sum_sq = 0.0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
    s.max = std::max(s.max, e);
  }
  s.mean = sum / s.count;
  s.rmse = std::sqrt(sum_sq / s.count);
  s.std_dev = s.count > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / s.count) /
                                                        (s.count - 1)))
                          : 0.0;
  return s;
}

}  // namespace

ErrorStats absolute_position_error(const std::vector<StampedPose>& estimate,
                                   const std::vector<StampedPose>& reference,
                                   const EvalParams& params) {
  const auto pairs = associate(estimate, reference, params.association_tolerance_s);
  if (pairs.empty()) throw std::runtime_error("no associated pose pairs");

  // Rigid alignment from the first associated pair.
  const StampedPose& e0 = estimate[pairs.front().est];
  const StampedPose& r0 = reference[pairs.front().ref];
  const Mat3 r_align = r0.attitude * e0.attitude.transpose();
  const Vec3 t_align = r0.position - r_align * e0.position;

  std::vector<double> errors;
  errors.reserve(pairs.size());
  for (const Association& a : pairs) {
    const Vec3 aligned = r_align * estimate[a.est].position + t_align;
    errors.push_back((aligned - reference[a.ref].position).norm());
  }
  return stats_from_errors(errors);
}

ErrorStats relative_position_error(const std::vector<StampedPose>& estimate,
                                   const std::vector<StampedPose>& reference,
                                   const EvalParams& params) {
  const auto pairs = associate(estimate, reference, params.association_tolerance_s);
  if (pairs.size() < 2) throw std::runtime_error("too few associated pose pairs");

  // Cumulative reference arc length at each associated pair.
  std::vector<double> arc(pairs.size(), 0.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    arc[i] = arc[i - 1] + (reference[pairs[i].ref].position -
                           reference[pairs[i - 1].ref].position)
                              .norm();
  }

  std::vector<double> errors;
  std::size_t start = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (arc[i] - arc[start] < params.rpe_segment_length_m) continue;
    const StampedPose& ea = estimate[pairs[start].est];
    const StampedPose& eb = estimate[pairs[i].est];
    const StampedPose& ra = reference[pairs[start].ref];
    const StampedPose& rb = reference[pairs[i].ref];
    // Relative translation expressed in the segment-start frame.
    const Vec3 d_est = ea.attitude.transpose() * (eb.position - ea.position);
    const Vec3 d_ref = ra.attitude.transpose() * (rb.position - ra.position);
    errors.push_back((d_est - d_ref).norm());
    start = i;  // non-overlapping segments
  }
  if (errors.empty()) throw std::runtime_error("trajectory shorter than one RPE segment");
  return stats_from_errors(errors);
}

}  // namespace rino
