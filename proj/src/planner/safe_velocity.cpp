#include "teleop/planner/safe_velocity.hpp"

#include <cmath>
#include <stdexcept>

namespace teleop::planner {

double max_safe_velocity(double max_deceleration, double sensor_range, double latency) {
  if (!(max_deceleration > 0.0)) throw std::invalid_argument("deceleration must be positive");
  if (!(sensor_range >= 0.0)) throw std::invalid_argument("sensor range must be non-negative");
  if (!(latency >= 0.0)) throw std::invalid_argument("latency must be non-negative");
  const double reaction = max_deceleration * latency;
  return std::sqrt(reaction * reaction + 2.0 * max_deceleration * sensor_range) - reaction;
}

}  // namespace teleop::planner
