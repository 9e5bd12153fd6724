#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "teleop/geometry.hpp"

namespace teleop::mapping {

/// Stamped depth returns in the sensor frame.
struct SensorScan {
  std::vector<Eigen::Vector3d> points;
  Pose sensor_pose;  // sensor -> world
  Pose body_pose;    // vehicle body -> world at the scan stamp
  double stamp = 0.0;
  std::string sensor_id;
  double max_range = 0.0;  // 0 when undeclared

  std::vector<Eigen::Vector3d> world_points() const;
};

}  // namespace teleop::mapping
