#include "rino/dataset.hpp"

#include <json.hpp>

#include <Eigen/Geometry>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rino {

using nlohmann::json;

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) { return Vec3(j.at(0), j.at(1), j.at(2)); }

struct Line {
  double t;
  int rank;  // merge tie-break: truth, imu, baro, radar
  std::string text;
};

}  // namespace

void write_dataset(const SimDataset& ds, std::ostream& os) {
  std::vector<Line> lines;
  lines.reserve(ds.imu.size() + ds.radar.size() + ds.baro.size() + ds.truth.size());

  for (const TruthRecord& r : ds.truth) {
    Eigen::Quaterniond q(r.attitude);
    if (q.w() < 0) q.coeffs() = -q.coeffs();
    json j = {{"type", "truth"},
              {"t", r.t},
              {"p", vec3_to_json(r.position)},
              {"q", json::array({q.x(), q.y(), q.z(), q.w()})},
              {"v", vec3_to_json(r.velocity)}};
    lines.push_back({r.t, 0, j.dump()});
  }
  for (const ImuRecord& r : ds.imu) {
    json j = {{"type", "imu"},
              {"t", r.t},
              {"w", vec3_to_json(r.angular_rate)},
              {"f", vec3_to_json(r.specific_force)}};
    lines.push_back({r.t, 1, j.dump()});
  }
  for (const BaroRecord& r : ds.baro) {
    json j = {{"type", "baro"}, {"t", r.t}, {"p", r.pressure_pa}};
    lines.push_back({r.t, 2, j.dump()});
  }
  for (const RadarScan& s : ds.radar) {
    json points = json::array();
    for (const RadarPoint& p : s.points) {
      points.push_back(json::array(
          {p.range_m, p.radial_speed_mps, p.phases.w_y, p.phases.w_z, p.aliased ? 1 : 0}));
    }
    json j = {{"type", "radar"}, {"t", s.timestamp_s}, {"points", points}};
    lines.push_back({s.timestamp_s, 3, j.dump()});
  }

  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return a.t != b.t ? a.t < b.t : a.rank < b.rank;
  });
  for (const Line& l : lines) {
    os << l.text << '\n';
  }
}

void write_dataset(const SimDataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset(ds, os);
}

SimDataset read_dataset(std::istream& is) {
  SimDataset ds;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string type = j.at("type");
      const double t = j.at("t");
      if (type == "imu") {
        ds.imu.push_back({t, vec3_from_json(j.at("w")), vec3_from_json(j.at("f"))});
      } else if (type == "baro") {
        ds.baro.push_back({t, j.at("p")});
      } else if (type == "radar") {
        RadarScan scan;
        scan.timestamp_s = t;
        for (const json& pj : j.at("points")) {
          RadarPoint p;
          p.range_m = pj.at(0);
          p.radial_speed_mps = pj.at(1);
          p.phases.w_y = pj.at(2);
          p.phases.w_z = pj.at(3);
          p.aliased = pj.size() > 4 && pj.at(4).get<int>() != 0;
          scan.points.push_back(p);
        }
        ds.radar.push_back(std::move(scan));
      } else if (type == "truth") {
        const json& q = j.at("q");
        TruthRecord r;
        r.t = t;
        r.attitude =
            Eigen::Quaterniond(q.at(3), q.at(0), q.at(1), q.at(2)).toRotationMatrix();
        r.position = vec3_from_json(j.at("p"));
        r.velocity = vec3_from_json(j.at("v"));
        ds.truth.push_back(r);
      } else {
        throw std::runtime_error("unknown record type '" + type + "'");
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "malformed dataset line " << line_number << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  return ds;
}

SimDataset read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open dataset '" + path + "'");
  return read_dataset(is);
}

}  // namespace rino
