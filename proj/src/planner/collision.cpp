#include "teleop/planner/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace teleop::planner {

std::vector<double> sample_times(double duration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("collision check step must be positive");
  const auto intervals = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  std::vector<double> times;
  times.reserve(intervals + 1);
  for (std::size_t i = 0; i < intervals; ++i) times.push_back(static_cast<double>(i) * dt);
  times.push_back(duration);
  return times;
}

ClearanceResult collision_check(const trajectory::MotionPrimitive& primitive,
                                const mapping::NearestNeighborIndex& map,
                                double collision_radius, double vehicle_radius, double dt,
                                bool stop_at_first_violation) {
  const double required = collision_radius + vehicle_radius;
  ClearanceResult result;
  result.min_clearance = std::numeric_limits<double>::infinity();
  for (double tau : sample_times(primitive.duration(), dt)) {
    const double d = map.nearest(primitive.world_position(tau)).distance;
    ++result.samples_checked;
    result.min_clearance = std::min(result.min_clearance, d);
    if (!(d >= required)) {
      result.collision_free = false;
      if (stop_at_first_violation) break;
    }
  }
  return result;
}

}  // namespace teleop::planner
