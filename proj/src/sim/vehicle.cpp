#include "teleop/sim/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace teleop::sim {

trajectory::RefState VehicleState::as_reference() const {
  trajectory::RefState ref;
  ref.derivs[0] << position, yaw;
  ref.derivs[1] << velocity, yaw_rate;
  ref.derivs[2] << acceleration, 0.0;
  return ref;
}

VehicleState step_vehicle(const VehicleState& state, const trajectory::MotionPrimitive& primitive,
                          double primitive_start, double now, const TrackingParams& params) {
  const double elapsed = now - primitive_start;
  if (elapsed < -1e-9) throw std::invalid_argument("vehicle stepped before primitive start");
  const trajectory::RefState ref = primitive.reference_at(std::max(elapsed, 0.0));

  VehicleState next;
  next.stamp = now;
  const double dt = now - state.stamp;
  if (params.mode == TrackingMode::kPerfect || !(params.lag_time_constant > 0.0)) {
    next.position = ref.position();
    next.velocity = ref.velocity();
    next.acceleration = ref.acceleration();
    next.yaw = ref.yaw();
    next.yaw_rate = ref.yaw_rate();
    return next;
  }
  if (!(dt > 0.0)) return state;

  const double alpha = 1.0 - std::exp(-dt / params.lag_time_constant);
  next.position = state.position + alpha * (ref.position() - state.position);
  next.yaw = wrap_angle(state.yaw + alpha * wrap_angle(ref.yaw() - state.yaw));
  next.velocity = (next.position - state.position) / dt;
  next.acceleration = (next.velocity - state.velocity) / dt;
  next.yaw_rate = wrap_angle(next.yaw - state.yaw) / dt;
  return next;
}

}  // namespace teleop::sim
