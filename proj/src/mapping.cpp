#include "rino/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rino {

namespace {

std::uint64_t voxel_key(const Vec3& p, double voxel_size) {
  const auto cell = [voxel_size](double x) {
    return static_cast<std::int64_t>(std::floor(x / voxel_size));
  };
  // 21 bits per axis, offset to stay positive; ample for hundreds of km.
  const std::uint64_t mask = (1ull << 21) - 1;
  const std::uint64_t cx = static_cast<std::uint64_t>(cell(p.x()) + (1 << 20)) & mask;
  const std::uint64_t cy = static_cast<std::uint64_t>(cell(p.y()) + (1 << 20)) & mask;
  const std::uint64_t cz = static_cast<std::uint64_t>(cell(p.z()) + (1 << 20)) & mask;
  return (cx << 42) | (cy << 21) | cz;
}

}  // namespace

void PointMap::insert(const std::vector<Vec3>& points_world) {
  for (const Vec3& p : points_world) {
    const std::uint64_t key = voxel_key(p, voxel_size_);
    if (occupied_.insert(key).second) {
      points_.push_back(p);
      dirty_ = true;
    }
  }
}

void PointMap::rebuild_index() const {
  nodes_.clear();
  nodes_.reserve(points_.size());
  std::vector<int> indices(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) indices[i] = static_cast<int>(i);
  root_ = build_recursive(indices, 0, static_cast<int>(indices.size()), 0);
  dirty_ = false;
}

int PointMap::build_recursive(std::vector<int>& indices, int begin, int end, int depth) const {
  if (begin >= end) return -1;
  const int axis = depth % 3;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(indices.begin() + begin, indices.begin() + mid, indices.begin() + end,
                   [this, axis](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back({indices[mid], axis, -1, -1});
  const int left = build_recursive(indices, begin, mid, depth + 1);
  const int right = build_recursive(indices, mid + 1, end, depth + 1);
  nodes_[node_id].left = left;
  nodes_[node_id].right = right;
  return node_id;
}

void PointMap::search_recursive(int node, const Vec3& query, double radius_sq,
                                std::vector<int>& hits) const {
  if (node < 0) return;
  const KdNode& n = nodes_[node];
  const Vec3& p = points_[n.point];
  if ((p - query).squaredNorm() <= radius_sq) hits.push_back(n.point);
  const double delta = query[n.axis] - p[n.axis];
  const int near = delta <= 0.0 ? n.left : n.right;
  const int far = delta <= 0.0 ? n.right : n.left;
  search_recursive(near, query, radius_sq, hits);
  if (delta * delta <= radius_sq) search_recursive(far, query, radius_sq, hits);
}

std::vector<int> PointMap::radius_indices(const Vec3& query, double radius_m) const {
  if (dirty_) rebuild_index();
  std::vector<int> hits;
  search_recursive(root_, query, radius_m * radius_m, hits);
  std::sort(hits.begin(), hits.end());
  return hits;
}

std::optional<NeighborhoodStats> PointMap::radius_neighbors(const Vec3& query,
                                                            double radius_m) const {
  const std::vector<int> hits = radius_indices(query, radius_m);
  if (static_cast<int>(hits.size()) < min_neighbors_) return std::nullopt;

  NeighborhoodStats stats;
  stats.count = static_cast<int>(hits.size());
  for (int i : hits) stats.centroid += points_[i];
  stats.centroid /= static_cast<double>(stats.count);
  if (stats.count > 1) {
    for (int i : hits) {
      const Vec3 d = points_[i] - stats.centroid;
      stats.covariance += d * d.transpose();
    }
    stats.covariance /= static_cast<double>(stats.count - 1);
  }
  return stats;
}

void PointMap::export_xyz(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os.precision(9);
  for (const Vec3& p : points_) {
    os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
}

}  // namespace rino
