#pragma once

#include "rino/geometry.hpp"

#include <optional>
#include <unordered_set>
#include <vector>

namespace rino {

struct NeighborhoodStats {
  Vec3 centroid = Vec3::Zero();
  Mat3 covariance = Mat3::Zero();  // 1/(n-1) normalization
  int count = 0;
};

/// Monolithic static-point map: voxel-downsampled storage plus a kd-tree
/// rebuilt lazily before queries.
class PointMap {
 public:
  explicit PointMap(double voxel_size_m = 0.5, int min_neighbors = 5)
      : voxel_size_(voxel_size_m), min_neighbors_(min_neighbors) {}

  /// Union then voxel-downsample; the first point per voxel wins.
  void insert(const std::vector<Vec3>& points_world);

  /// Exact radius search. Returns nullopt when fewer than min_neighbors fall
  /// inside the radius.
  std::optional<NeighborhoodStats> radius_neighbors(const Vec3& query, double radius_m) const;

  /// Indices (into points()) of all points within the radius; exact.
  std::vector<int> radius_indices(const Vec3& query, double radius_m) const;

  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double voxel_size() const { return voxel_size_; }
  int min_neighbors() const { return min_neighbors_; }

  /// Line-delimited "x y z" export.
  void export_xyz(const std::string& path) const;

 private:
  struct KdNode {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  void rebuild_index() const;
  int build_recursive(std::vector<int>& indices, int begin, int end, int depth) const;
  void search_recursive(int node, const Vec3& query, double radius_sq,
                        std::vector<int>& hits) const;

  double voxel_size_;
  int min_neighbors_;
  std::vector<Vec3> points_;
  std::unordered_set<std::uint64_t> occupied_;

  mutable std::vector<KdNode> nodes_;
  mutable int root_ = -1;
  mutable bool dirty_ = true;
};

}  // namespace rino
