#include "teleop/trajectory/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "teleop/geometry.hpp"

namespace teleop::trajectory {

namespace {

// falling_factorial[i][j] = i! / (i - j)!, the coefficient picked up by
// tau^i after j differentiations.
constexpr auto kFallingFactorial = [] {
  std::array<std::array<double, kMaxDerivative + 1>, kNumCoefficients> table{};
  for (int i = 0; i < kNumCoefficients; ++i) {
    for (int j = 0; j <= kMaxDerivative; ++j) {
      double value = 1.0;
      for (int k = 0; k < j; ++k) value *= (i - k);
      table[i][j] = i >= j ? value : 0.0;
    }
  }
  return table;
}();

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

}  // namespace

Eigen::Vector4d unicycle_velocity(const Action& action, double tau) {
  return {action.vx * std::cos(action.omega * tau), action.vx * std::sin(action.omega * tau),
          action.vz, action.omega};
}

RefState RefState::at_rest(const Eigen::Vector3d& position, double yaw) {
  RefState state;
  state.derivs[0] << position, wrap_angle(yaw);
  return state;
}

bool RefState::all_finite() const {
  for (const auto& d : derivs) {
    if (!d.allFinite()) return false;
  }
  return true;
}

LocalFrame LocalFrame::at(const RefState& world_ref, double stamp) {
  LocalFrame frame;
  frame.origin = world_ref.position();
  frame.heading = wrap_angle(world_ref.yaw());
  frame.stamp = stamp;
  return frame;
}

RefState LocalFrame::to_local(const RefState& world) const {
  RefState local;
  const Eigen::Vector3d offset = world.position() - origin;
  local.derivs[0].head<2>() = rotate(offset.head<2>(), -heading);
  local.derivs[0][2] = offset.z();
  local.derivs[0][3] = wrap_angle(world.yaw() - heading);
  for (int j = 1; j <= kMaxDerivative; ++j) {
    local.derivs[j].head<2>() = rotate(world.derivs[j].head<2>(), -heading);
    local.derivs[j].tail<2>() = world.derivs[j].tail<2>();
  }
  return local;
}

Eigen::Vector4d LocalFrame::to_world(const Eigen::Vector4d& local, int order) const {
  Eigen::Vector4d world = local;
  world.head<2>() = rotate(local.head<2>(), heading);
  if (order == 0) {
    world.head<3>() += origin;
    world[3] = wrap_angle(local[3] + heading);
  }
  return world;
}

MotionPrimitive::MotionPrimitive(const Coefficients& coeffs, double duration,
                                 const Action& action, const LocalFrame& frame, double rotation,
                                 PrimitiveKind kind)
    : coeffs_(coeffs),
      duration_(duration),
      action_(action),
      frame_(frame),
      rotation_(rotation),
      kind_(kind) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("motion primitive duration must be positive");
  }
}

Eigen::Vector4d MotionPrimitive::evaluate(double tau, int order) const {
  if (order < 0 || order > kMaxDerivative) {
    throw std::out_of_range("derivative order " + std::to_string(order) + " not in [0, 4]");
  }
  const double slack = 1e-9 * std::max(1.0, duration_);
  if (!(tau >= -slack && tau <= duration_ + slack)) {
    throw std::out_of_range("tau " + std::to_string(tau) + " outside primitive duration " +
                            std::to_string(duration_));
  }
  return evaluate_unchecked(std::clamp(tau, 0.0, duration_), order);
}

Eigen::Vector4d MotionPrimitive::evaluate_unchecked(double tau, int order) const {
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  // Horner on the differentiated polynomial.
  for (int i = kNumCoefficients - 1; i >= order; --i) {
    out = out * tau + kFallingFactorial[i][order] * coeffs_.col(i);
  }
  return out;
}

Eigen::Vector4d MotionPrimitive::to_world(double tau, int order) const {
  return frame_.to_world(evaluate(tau, order), order);
}

RefState MotionPrimitive::world_state(double tau) const {
  RefState state;
  for (int j = 0; j <= kMaxDerivative; ++j) state.derivs[j] = to_world(tau, j);
  return state;
}

Eigen::Vector3d MotionPrimitive::world_position(double tau) const {
  return to_world(tau, 0).head<3>();
}

RefState MotionPrimitive::reference_at(double tau) const {
  if (tau <= duration_) return world_state(std::max(tau, 0.0));
  RefState state = world_state(duration_);
  const double extra = tau - duration_;
  state.derivs[0].head<3>() += extra * state.derivs[1].head<3>();
  state.derivs[0][3] = wrap_angle(state.derivs[0][3] + extra * state.derivs[1][3]);
  for (int j = 2; j <= kMaxDerivative; ++j) state.derivs[j].setZero();
  return state;
}

}  // namespace teleop::trajectory
