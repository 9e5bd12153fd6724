#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "teleop/mapping/nearest.hpp"

namespace teleop::mapping {

/// Static 3-D KD-tree with exact nearest-neighbor queries.
///
/// Points are stored in an implicit balanced layout: the median of every
/// index range is the node, split on the axis of largest extent. Ranges at or
/// below the leaf size are scanned linearly.
class KdTree final : public NearestNeighborIndex {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Eigen::Vector3d> points);

  NearestResult nearest(const Eigen::Vector3d& query) const override;

  /// Nearest point strictly closer than `bound`; not found otherwise.
  NearestResult nearest_within(const Eigen::Vector3d& query, double bound) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const Eigen::Vector3d> points() const { return points_; }

 private:
  static constexpr std::size_t kLeafSize = 8;

  void build(std::size_t lo, std::size_t hi);
  using Offsets = std::array<double, 3>;

  // `offsets` holds the query's per-axis distance to the current cell and
  // `cell_sq` their squared sum, a lower bound on any distance inside it.
  void search(std::size_t lo, std::size_t hi, const Eigen::Vector3d& q, double& best_sq,
              std::size_t& best, Offsets& offsets, double cell_sq) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint8_t> split_axis_;
};

}  // namespace teleop::mapping
