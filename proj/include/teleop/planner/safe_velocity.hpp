#pragma once

namespace teleop::planner {

/// Largest speed whose reaction distance (speed * latency) plus braking
/// distance at constant deceleration still fits inside the sensor range:
/// the positive root of v^2 / (2 a) + v * latency = range.
///
/// Throws std::invalid_argument unless max_deceleration > 0, range >= 0 and
/// latency >= 0.
double max_safe_velocity(double max_deceleration, double sensor_range, double latency);

}  // namespace teleop::planner
