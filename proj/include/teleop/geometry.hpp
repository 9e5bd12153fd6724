#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace teleop {

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

/// Absolute wrapped difference between two headings, in [0, pi].
inline double heading_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

/// Rigid transform. Maps points from the child frame into the parent frame.
struct Pose {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  static Pose from_position_yaw(const Eigen::Vector3d& position, double yaw) {
    Pose pose;
    pose.translation = position;
    pose.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
    return pose;
  }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  Pose operator*(const Pose& child) const {
    Pose out;
    out.rotation = (rotation * child.rotation).normalized();
    out.translation = rotation * child.translation + translation;
    return out;
  }

  /// Heading of the child x-axis projected onto the parent x-y plane.
  double yaw() const {
    const Eigen::Vector3d x_axis = rotation * Eigen::Vector3d::UnitX();
    return std::atan2(x_axis.y(), x_axis.x());
  }
};

}  // namespace teleop
