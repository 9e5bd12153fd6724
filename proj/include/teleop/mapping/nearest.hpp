#pragma once

#include <limits>

#include <Eigen/Core>

namespace teleop::mapping {

struct NearestResult {
  Eigen::Vector3d point = Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
  double distance = std::numeric_limits<double>::infinity();

  bool found() const { return distance < std::numeric_limits<double>::infinity(); }
};

/// Exact nearest-neighbor lookup over a point set.
class NearestNeighborIndex {
 public:
  virtual ~NearestNeighborIndex() = default;
  virtual NearestResult nearest(const Eigen::Vector3d& query) const = 0;
};

}  // namespace teleop::mapping
