#pragma once

#include <Eigen/LU>

#include "teleop/trajectory/types.hpp"

namespace teleop::trajectory {

/// Absolute tolerance on every boundary constraint after a solve.
inline constexpr double kConstraintTolerance = 1e-6;

/// Solves the snap-continuous boundary value problem for one primitive.
///
/// Each coordinate is an 8th order polynomial matching the reference state's
/// derivatives 0..4 at tau = 0, the unicycle endpoint velocity at tau = T, and
/// zero acceleration, jerk and snap at tau = T. Endpoint position and yaw are
/// free.
///
/// The system is solved in normalized time s = tau / T, where the 9x9
/// constraint matrix does not depend on T at all, so it is factored once and
/// shared by every axis, action and duration.
class PrimitiveGenerator {
 public:
  PrimitiveGenerator();

  /// `ref` must already be expressed in `frame`. `rotation` turns the
  /// endpoint velocity about the frame z-axis (library rotation); the yaw
  /// endpoint is unaffected.
  ///
  /// Throws std::invalid_argument for non-positive or non-finite T or a
  /// non-finite reference, and std::runtime_error if the re-evaluated
  /// constraints miss kConstraintTolerance.
  MotionPrimitive generate(const RefState& ref, const Action& action, double duration,
                           const LocalFrame& frame, double rotation = 0.0) const;

  /// Largest constraint violation of `primitive` against the data it was
  /// built from.
  static double constraint_residual(const MotionPrimitive& primitive, const RefState& ref);

  /// Shared instance.
  static const PrimitiveGenerator& instance();

 private:
  Eigen::PartialPivLU<Eigen::Matrix<double, kNumCoefficients, kNumCoefficients>> lu_;
};

/// In-frame endpoint velocity targeted by a primitive (rotation applied).
Eigen::Vector4d endpoint_velocity(const Action& action, double duration, double rotation);

inline MotionPrimitive generate_primitive(const RefState& ref, const Action& action,
                                          double duration, const LocalFrame& frame,
                                          double rotation = 0.0) {
  return PrimitiveGenerator::instance().generate(ref, action, duration, frame, rotation);
}

/// Primitive duration growing linearly with the requested velocity change.
double adaptive_duration(double base_duration, double gain,
                         const Eigen::Vector3d& desired_velocity,
                         const Eigen::Vector3d& current_velocity);

/// Local frame and in-frame reference for a regeneration from a world-frame
/// reference state.
struct Regeneration {
  LocalFrame frame;
  RefState local_ref;
};
Regeneration regenerate_from(const RefState& world_ref, double stamp);

}  // namespace teleop::trajectory
