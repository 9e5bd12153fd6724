#include "teleop/trajectory/flatness.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace teleop::trajectory {

AttitudeFeedforward flat_feedforward(const Eigen::Vector3d& acceleration, double yaw,
                                     double gravity) {
  const Eigen::Vector3d thrust = acceleration + gravity * Eigen::Vector3d::UnitZ();
  const double norm = thrust.norm();
  if (!(norm > 1e-6)) throw FreeFallError("thrust direction undefined in free fall");

  const Eigen::Vector3d z_body = thrust / norm;
  const Eigen::Vector3d x_heading(std::cos(yaw), std::sin(yaw), 0.0);
  Eigen::Vector3d y_body = z_body.cross(x_heading);
  Eigen::Vector3d x_body;
  if (y_body.norm() > 1e-9) {
    y_body.normalize();
    x_body = y_body.cross(z_body);
  } else {
    // Body z lies along the heading; fall back to the lateral heading axis.
    const Eigen::Vector3d y_heading(-std::sin(yaw), std::cos(yaw), 0.0);
    x_body = y_heading.cross(z_body).normalized();
    y_body = z_body.cross(x_body);
  }

  AttitudeFeedforward out;
  out.thrust_direction = z_body;
  out.attitude.col(0) = x_body;
  out.attitude.col(1) = y_body;
  out.attitude.col(2) = z_body;
  return out;
}

}  // namespace teleop::trajectory
