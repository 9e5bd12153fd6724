#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace teleop::mapping {

/// Integer voxel index; voxel k spans [k * size, (k + 1) * size) on each axis.
struct VoxelKey {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  auto operator<=>(const VoxelKey&) const = default;
};

VoxelKey voxel_key(const Eigen::Vector3d& point, double voxel_size);
Eigen::Vector3d voxel_center(const VoxelKey& key, double voxel_size);

/// Sorted, deduplicated voxel keys of `points`.
std::vector<VoxelKey> voxelize_keys(std::span<const Eigen::Vector3d> points, double voxel_size);

/// Centers of the occupied voxels, ordered by voxel key.
std::vector<Eigen::Vector3d> voxelize(std::span<const Eigen::Vector3d> points, double voxel_size);

std::vector<Eigen::Vector3d> voxel_centers(std::span<const VoxelKey> keys, double voxel_size);

/// Sorted union of two sorted, deduplicated key sets.
std::vector<VoxelKey> merge_keys(std::span<const VoxelKey> a, std::span<const VoxelKey> b);

}  // namespace teleop::mapping
