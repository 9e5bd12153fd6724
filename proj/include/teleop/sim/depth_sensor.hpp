#pragma once

#include <string>
#include <vector>

#include "teleop/geometry.hpp"
#include "teleop/mapping/sensor_scan.hpp"
#include "teleop/sim/world.hpp"

namespace teleop::sim {

/// Ray-cast depth camera. Sensor frame: x along the boresight, y left, z up.
struct DepthSensor {
  std::string id = "front";
  Pose mount;  // sensor pose in the body frame
  double h_fov = 87.0 * std::numbers::pi / 180.0;
  double v_fov = 58.0 * std::numbers::pi / 180.0;
  double max_range = 10.0;
  int cols = 64;
  int rows = 36;
  double rate = 30.0;

  /// Throws std::invalid_argument when fov, range, ray counts or rate are out of range.
  void validate() const;

  /// Unit ray directions in the sensor frame, row-major. Ray centers are
  /// spread evenly, so odd counts include the boresight.
  std::vector<Eigen::Vector3d> ray_directions() const;
};

/// Forward camera and a second one pitched 45 degrees up.
std::vector<DepthSensor> default_sensor_rig();

mapping::SensorScan raycast_scan(const World& world, const Pose& body_pose,
                                 const DepthSensor& sensor, double stamp);

}  // namespace teleop::sim
