#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace teleop::trajectory {

inline constexpr double kGravity = 9.81;

/// Raised when the commanded acceleration cancels gravity and the thrust
/// direction is undefined.
class FreeFallError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AttitudeFeedforward {
  Eigen::Vector3d thrust_direction;  // body z-axis in world frame
  Eigen::Matrix3d attitude;          // columns are body x, y, z in world frame
};

/// Desired attitude from flat outputs: body z along (acc + g e_z), body x the
/// yaw heading projected onto the plane orthogonal to body z.
AttitudeFeedforward flat_feedforward(const Eigen::Vector3d& acceleration, double yaw,
                                     double gravity = kGravity);

}  // namespace teleop::trajectory
