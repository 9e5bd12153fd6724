#include "teleop/mapping/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace teleop::mapping {

VoxelKey voxel_key(const Eigen::Vector3d& point, double voxel_size) {
  return {static_cast<std::int32_t>(std::floor(point.x() / voxel_size)),
          static_cast<std::int32_t>(std::floor(point.y() / voxel_size)),
          static_cast<std::int32_t>(std::floor(point.z() / voxel_size))};
}

Eigen::Vector3d voxel_center(const VoxelKey& key, double voxel_size) {
  return {(key.x + 0.5) * voxel_size, (key.y + 0.5) * voxel_size, (key.z + 0.5) * voxel_size};
}

std::vector<VoxelKey> voxelize_keys(std::span<const Eigen::Vector3d> points, double voxel_size) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel size must be positive");
  std::vector<VoxelKey> keys;
  keys.reserve(points.size());
  for (const auto& p : points) keys.push_back(voxel_key(p, voxel_size));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::vector<Eigen::Vector3d> voxel_centers(std::span<const VoxelKey> keys, double voxel_size) {
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(keys.size());
  for (const auto& k : keys) centers.push_back(voxel_center(k, voxel_size));
  return centers;
}

std::vector<Eigen::Vector3d> voxelize(std::span<const Eigen::Vector3d> points, double voxel_size) {
  return voxel_centers(voxelize_keys(points, voxel_size), voxel_size);
}

std::vector<VoxelKey> merge_keys(std::span<const VoxelKey> a, std::span<const VoxelKey> b) {
  std::vector<VoxelKey> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace teleop::mapping
