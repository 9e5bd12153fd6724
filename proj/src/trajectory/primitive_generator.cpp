#include "teleop/trajectory/primitive_generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace teleop::trajectory {

namespace {

using SquareMatrix = Eigen::Matrix<double, kNumCoefficients, kNumCoefficients>;
using RhsMatrix = Eigen::Matrix<double, kNumCoefficients, 4>;

double falling_factorial(int i, int j) {
  double value = 1.0;
  for (int k = 0; k < j; ++k) value *= (i - k);
  return value;
}

// Rows 0-4: derivatives 0..4 at s = 0. Row 5: velocity at s = 1. Rows 6-8:
// acceleration, jerk and snap at s = 1.
SquareMatrix normalized_constraint_matrix() {
  SquareMatrix m = SquareMatrix::Zero();
  for (int j = 0; j <= kMaxDerivative; ++j) m(j, j) = falling_factorial(j, j);
  for (int row = 5; row < kNumCoefficients; ++row) {
    const int order = row - 4;
    for (int i = order; i < kNumCoefficients; ++i) m(row, i) = falling_factorial(i, order);
  }
  return m;
}

}  // namespace

PrimitiveGenerator::PrimitiveGenerator() : lu_(normalized_constraint_matrix()) {}

const PrimitiveGenerator& PrimitiveGenerator::instance() {
  static const PrimitiveGenerator generator;
  return generator;
}

Eigen::Vector4d endpoint_velocity(const Action& action, double duration, double rotation) {
  Eigen::Vector4d v = unicycle_velocity(action, duration);
  if (rotation != 0.0) {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double x = v.x();
    v.x() = c * x - s * v.y();
    v.y() = s * x + c * v.y();
  }
  return v;
}

MotionPrimitive PrimitiveGenerator::generate(const RefState& ref, const Action& action,
                                             double duration, const LocalFrame& frame,
                                             double rotation) const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("primitive duration must be positive and finite");
  }
  if (!ref.all_finite()) throw std::invalid_argument("reference state is not finite");

  // In normalized time, the j-th derivative scales by T^j.
  RhsMatrix rhs = RhsMatrix::Zero();
  double scale = 1.0;
  for (int j = 0; j <= kMaxDerivative; ++j) {
    rhs.row(j) = scale * ref.derivs[j].transpose();
    scale *= duration;
  }
  rhs.row(5) = duration * endpoint_velocity(action, duration, rotation).transpose();

  const RhsMatrix normalized = lu_.solve(rhs);

  MotionPrimitive::Coefficients coeffs;
  double inv_power = 1.0;
  for (int i = 0; i < kNumCoefficients; ++i) {
    coeffs.col(i) = normalized.row(i).transpose() * inv_power;
    inv_power /= duration;
  }

  MotionPrimitive primitive(coeffs, duration, action, frame, rotation);
  const double residual = constraint_residual(primitive, ref);
  if (!(residual <= kConstraintTolerance)) {
    throw std::runtime_error("primitive solve residual " + std::to_string(residual) +
                             " exceeds tolerance; duration " + std::to_string(duration) +
                             " too small");
  }
  return primitive;
}

double PrimitiveGenerator::constraint_residual(const MotionPrimitive& primitive,
                                               const RefState& ref) {
  const double T = primitive.duration();
  double worst = 0.0;
  for (int j = 0; j <= kMaxDerivative; ++j) {
    worst = std::max(worst, (primitive.evaluate(0.0, j) - ref.derivs[j]).cwiseAbs().maxCoeff());
  }
  const Eigen::Vector4d v_end =
      endpoint_velocity(primitive.action(), T, primitive.rotation());
  worst = std::max(worst, (primitive.evaluate(T, 1) - v_end).cwiseAbs().maxCoeff());
  for (int j = 2; j <= kMaxDerivative; ++j) {
    worst = std::max(worst, primitive.evaluate(T, j).cwiseAbs().maxCoeff());
  }
  return worst;
}

double adaptive_duration(double base_duration, double gain,
                         const Eigen::Vector3d& desired_velocity,
                         const Eigen::Vector3d& current_velocity) {
  return std::max(base_duration,
                  base_duration + gain * (desired_velocity - current_velocity).norm());
}

Regeneration regenerate_from(const RefState& world_ref, double stamp) {
  Regeneration out;
  out.frame = LocalFrame::at(world_ref, stamp);
  out.local_ref = out.frame.to_local(world_ref);
  return out;
}

}  // namespace teleop::trajectory
