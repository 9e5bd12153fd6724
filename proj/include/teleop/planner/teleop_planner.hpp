#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "teleop/mapping/nearest.hpp"
#include "teleop/planner/action_grid.hpp"
#include "teleop/trajectory/types.hpp"

namespace teleop::planner {

using trajectory::LocalFrame;
using trajectory::MotionPrimitive;
using trajectory::RefState;

struct PlannerParams {
  double duration = 1.5;           // T, seconds
  double collision_radius = 0.4;   // r, meters
  double vehicle_radius = 0.35;    // r_v, meters
  double check_dt = 0.04;          // collision sampling step, seconds
  bool adaptive_duration = false;
  double duration_gain = 0.15;     // seconds per m/s of requested velocity change
  double brake_acceleration = 6.0; // emergency stop deceleration, m/s^2
};

/// Outcome of one pruning pass.
struct PruneResult {
  MotionPrimitive chosen;
  Action chosen_action;
  std::size_t chosen_index = 0;
  Action operator_action;  // grid action nearest to the joystick
  std::size_t operator_index = 0;
  bool operator_action_pruned = false;
  bool emergency_stop = false;
  std::size_t candidates_checked = 0;
  double min_clearance = 0.0;
  double generation_ms = 0.0;
  double pruning_ms = 0.0;
};

/// Duration for one action: the base T, or the adaptive rule when enabled.
double primitive_duration(const PlannerParams& params, const Action& action,
                          const RefState& local_ref, double rotation);

/// One primitive per grid action, all from the same in-frame reference.
std::vector<MotionPrimitive> build_library(const ActionGrid& grid, const RefState& local_ref,
                                           const LocalFrame& frame,
                                           std::span<const double> durations);

/// Library with per-action durations from `params`.
std::vector<MotionPrimitive> build_library(const ActionGrid& grid, const RefState& local_ref,
                                           const LocalFrame& frame, const PlannerParams& params);

/// Constant-jerk braking from the reference to zero velocity and yaw rate,
/// peaking at `brake_acceleration`.
MotionPrimitive emergency_stop_primitive(const RefState& local_ref, const LocalFrame& frame,
                                         double brake_acceleration);

/// Pops actions nearest-first, generating each primitive on demand, and
/// returns the first one whose every sample clears r + r_v. If no grid
/// action is free, returns an emergency stop flagged as pruned.
PruneResult prune_and_select(const ActionGrid& grid, const Action& joystick,
                             const RefState& local_ref, const LocalFrame& frame,
                             const mapping::NearestNeighborIndex& map,
                             const PlannerParams& params);

}  // namespace teleop::planner
