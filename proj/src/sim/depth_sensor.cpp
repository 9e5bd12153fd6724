#include "teleop/sim/depth_sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace teleop::sim {

void DepthSensor::validate() const {
  const double pi = std::numbers::pi;
  if (!(h_fov > 0.0 && h_fov < pi) || !(v_fov > 0.0 && v_fov < pi)) {
    throw std::invalid_argument("sensor " + id + ": field of view must be in (0, pi)");
  }
  if (!(max_range > 0.0)) throw std::invalid_argument("sensor " + id + ": max range must be positive");
  if (cols < 1 || rows < 1) throw std::invalid_argument("sensor " + id + ": needs at least one ray");
  if (!(rate > 0.0)) throw std::invalid_argument("sensor " + id + ": rate must be positive");
}

std::vector<Eigen::Vector3d> DepthSensor::ray_directions() const {
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(static_cast<std::size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    const double elevation = v_fov * ((r + 0.5) / rows - 0.5);
    for (int c = 0; c < cols; ++c) {
      const double azimuth = h_fov * ((c + 0.5) / cols - 0.5);
      dirs.emplace_back(std::cos(elevation) * std::cos(azimuth),
                        std::cos(elevation) * std::sin(azimuth), std::sin(elevation));
    }
  }
  return dirs;
}

std::vector<DepthSensor> default_sensor_rig() {
  DepthSensor front;
  front.id = "front";
  front.mount.translation = {0.15, 0.0, 0.0};

  DepthSensor up = front;
  up.id = "up";
  up.mount.translation = {0.15, 0.0, 0.05};
  // Pitch up: rotating about -y lifts the boresight toward +z.
  up.mount.rotation =
      Eigen::Quaterniond(Eigen::AngleAxisd(-std::numbers::pi / 4.0, Eigen::Vector3d::UnitY()));
  return {front, up};
}

mapping::SensorScan raycast_scan(const World& world, const Pose& body_pose,
                                 const DepthSensor& sensor, double stamp) {
  sensor.validate();
  mapping::SensorScan scan;
  scan.sensor_pose = body_pose * sensor.mount;
  scan.body_pose = body_pose;
  scan.stamp = stamp;
  scan.sensor_id = sensor.id;
  scan.max_range = sensor.max_range;

  const Eigen::Vector3d origin = scan.sensor_pose.translation;
  for (const auto& dir : sensor.ray_directions()) {
    const Eigen::Vector3d world_dir = scan.sensor_pose.rotation * dir;
    if (const auto hit = world.raycast(origin, world_dir, sensor.max_range, stamp)) {
      scan.points.push_back(dir * *hit);
    }
  }
  return scan;
}

}  // namespace teleop::sim
