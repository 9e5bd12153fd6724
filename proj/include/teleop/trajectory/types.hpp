#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Core>

namespace teleop::trajectory {

/// Highest derivative order carried by reference states (snap).
inline constexpr int kMaxDerivative = 4;
inline constexpr int kNumCoefficients = 9;

/// Operator intent in the local frame at input time.
struct Action {
  double vx = 0.0;     // forward velocity, m/s
  double vz = 0.0;     // vertical velocity, m/s
  double omega = 0.0;  // yaw rate, rad/s

  bool operator==(const Action&) const = default;
};

/// Endpoint velocity of the unicycle model, (xdot, ydot, zdot, yawdot) at tau.
Eigen::Vector4d unicycle_velocity(const Action& action, double tau);

/// Flat output (x, y, z, yaw) and its time derivatives up to snap.
///
/// `derivs[j]` holds the j-th time derivative of all four coordinates, so
/// `derivs[0]` is (x, y, z, yaw), `derivs[1]` the velocities and so on.
struct RefState {
  std::array<Eigen::Vector4d, kMaxDerivative + 1> derivs;

  RefState() { for (auto& d : derivs) d.setZero(); }

  static RefState at_rest(const Eigen::Vector3d& position, double yaw);

  Eigen::Vector3d position() const { return derivs[0].head<3>(); }
  double yaw() const { return derivs[0][3]; }
  Eigen::Vector3d velocity() const { return derivs[1].head<3>(); }
  Eigen::Vector3d acceleration() const { return derivs[2].head<3>(); }
  double yaw_rate() const { return derivs[1][3]; }

  bool all_finite() const;
};

/// Gravity-aligned frame snapshotted at a regeneration instant.
struct LocalFrame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double heading = 0.0;
  double stamp = 0.0;

  /// Frame whose origin and heading are the reference position and yaw.
  static LocalFrame at(const RefState& world_ref, double stamp);

  /// Rotates a world-frame state into this frame (position and yaw relative
  /// to the origin, derivatives rotated by -heading).
  RefState to_local(const RefState& world) const;

  /// Rotates an in-frame vector by heading; translates and offsets yaw for order 0.
  Eigen::Vector4d to_world(const Eigen::Vector4d& local, int order) const;
};

enum class PrimitiveKind {
  kNominal,
  kEmergencyStop,
};

/// Four 8th order polynomials in tau over [0, duration], expressed in `frame`.
class MotionPrimitive {
 public:
  using Coefficients = Eigen::Matrix<double, 4, kNumCoefficients, Eigen::RowMajor>;

  MotionPrimitive() = default;
  MotionPrimitive(const Coefficients& coeffs, double duration, const Action& action,
                  const LocalFrame& frame, double rotation = 0.0,
                  PrimitiveKind kind = PrimitiveKind::kNominal);

  /// `order`-th derivative of (x, y, z, yaw) in the local frame.
  /// Throws std::out_of_range for tau outside [0, duration] or order outside [0, 4].
  Eigen::Vector4d evaluate(double tau, int order) const;

  /// Same as evaluate() but in the world frame; yaw is wrapped for order 0.
  Eigen::Vector4d to_world(double tau, int order) const;

  /// All derivatives at tau, in the world frame.
  RefState world_state(double tau) const;

  /// World-frame position at tau.
  Eigen::Vector3d world_position(double tau) const;

  /// World-frame reference for any tau >= 0. Past the duration the primitive
  /// continues at its terminal velocity and yaw rate with zero higher
  /// derivatives.
  RefState reference_at(double tau) const;

  const Coefficients& coefficients() const { return coeffs_; }
  double duration() const { return duration_; }
  const Action& action() const { return action_; }
  const LocalFrame& frame() const { return frame_; }
  double rotation() const { return rotation_; }
  PrimitiveKind kind() const { return kind_; }

 private:
  Eigen::Vector4d evaluate_unchecked(double tau, int order) const;

  Coefficients coeffs_ = Coefficients::Zero();
  double duration_ = 0.0;
  Action action_;
  LocalFrame frame_;
  double rotation_ = 0.0;
  PrimitiveKind kind_ = PrimitiveKind::kNominal;
};

}  // namespace teleop::trajectory
