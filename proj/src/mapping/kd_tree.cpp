#include "teleop/mapping/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace teleop::mapping {

namespace {

double squared_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

KdTree::KdTree(std::vector<Eigen::Vector3d> points)
    : points_(std::move(points)), split_axis_(points_.size(), 0) {
  build(0, points_.size());
}

void KdTree::build(std::size_t lo, std::size_t hi) {
  if (hi - lo <= kLeafSize) return;

  Eigen::Vector3d min = points_[lo];
  Eigen::Vector3d max = points_[lo];
  for (std::size_t i = lo + 1; i < hi; ++i) {
    min = min.cwiseMin(points_[i]);
    max = max.cwiseMax(points_[i]);
  }
  Eigen::Index axis = 0;
  (max - min).maxCoeff(&axis);

  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(points_.begin() + lo, points_.begin() + mid, points_.begin() + hi,
                   [axis](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                     return a[axis] < b[axis];
                   });
  split_axis_[mid] = static_cast<std::uint8_t>(axis);
  build(lo, mid);
  build(mid + 1, hi);
}

void KdTree::search(std::size_t lo, std::size_t hi, const Eigen::Vector3d& q, double& best_sq,
                    std::size_t& best, Offsets& offsets, double cell_sq) const {
  if (hi - lo <= kLeafSize) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = squared_distance(points_[i], q);
      if (d < best_sq) {
        best_sq = d;
        best = i;
      }
    }
    return;
  }

  const std::size_t mid = lo + (hi - lo) / 2;
  const int axis = split_axis_[mid];
  const double diff = q[axis] - points_[mid][axis];

  const double d = squared_distance(points_[mid], q);
  if (d < best_sq) {
    best_sq = d;
    best = mid;
  }

  // The far side lies at least `diff` away along the split axis; replacing
  // this axis' share of the cell distance keeps the bound exact.
  const bool left_first = diff < 0.0;
  if (left_first) {
    search(lo, mid, q, best_sq, best, offsets, cell_sq);
  } else {
    search(mid + 1, hi, q, best_sq, best, offsets, cell_sq);
  }
  const double saved = offsets[axis];
  const double far_sq = cell_sq - saved * saved + diff * diff;
  if (far_sq < best_sq) {
    offsets[axis] = diff;
    if (left_first) {
      search(mid + 1, hi, q, best_sq, best, offsets, far_sq);
    } else {
      search(lo, mid, q, best_sq, best, offsets, far_sq);
    }
    offsets[axis] = saved;
  }
}

NearestResult KdTree::nearest(const Eigen::Vector3d& query) const {
  return nearest_within(query, std::numeric_limits<double>::infinity());
}

NearestResult KdTree::nearest_within(const Eigen::Vector3d& query, double bound) const {
  NearestResult result;
  if (points_.empty()) return result;
  double best_sq = bound * bound;
  std::size_t best = points_.size();
  Offsets offsets{0.0, 0.0, 0.0};
  search(0, points_.size(), query, best_sq, best, offsets, 0.0);
  if (best < points_.size()) {
    result.point = points_[best];
    result.distance = std::sqrt(best_sq);
  }
  return result;
}

}  // namespace teleop::mapping
