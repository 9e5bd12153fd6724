#pragma once

#include "teleop/geometry.hpp"
#include "teleop/trajectory/types.hpp"

namespace teleop::sim {

struct VehicleState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double stamp = 0.0;

  Pose body_pose() const { return Pose::from_position_yaw(position, yaw); }
  trajectory::RefState as_reference() const;
};

enum class TrackingMode {
  kPerfect,
  kFirstOrderLag,
};

struct TrackingParams {
  TrackingMode mode = TrackingMode::kPerfect;
  double lag_time_constant = 0.05;  // seconds
};

/// Advances the vehicle to `now` while following `primitive`, which started
/// executing at `primitive_start`. Past the primitive's duration the vehicle
/// keeps the terminal velocity.
///
/// In lag mode position and yaw relax toward the reference with a first-order
/// filter; velocity and acceleration are finite differences of the filtered
/// position.
VehicleState step_vehicle(const VehicleState& state, const trajectory::MotionPrimitive& primitive,
                          double primitive_start, double now, const TrackingParams& params = {});

}  // namespace teleop::sim
