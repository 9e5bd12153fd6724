#pragma once

#include <cstddef>
#include <vector>

#include "teleop/mapping/nearest.hpp"
#include "teleop/trajectory/types.hpp"

namespace teleop::planner {

struct ClearanceResult {
  bool collision_free = true;
  double min_clearance = 0.0;  // +inf against an empty map
  std::size_t samples_checked = 0;
};

/// Sample times 0, dt, 2 dt, ... with the duration itself always included.
std::vector<double> sample_times(double duration, double dt);

/// Checks world-frame primitive positions against the map. A sample is clear
/// when its nearest map point is at least collision_radius + vehicle_radius
/// away; the primitive is free only if every sample is clear.
///
/// With `stop_at_first_violation`, checking ends at the first blocked sample
/// and min_clearance covers only the samples visited.
ClearanceResult collision_check(const trajectory::MotionPrimitive& primitive,
                                const mapping::NearestNeighborIndex& map,
                                double collision_radius, double vehicle_radius, double dt,
                                bool stop_at_first_violation = false);

}  // namespace teleop::planner
