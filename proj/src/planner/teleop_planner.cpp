#include "teleop/planner/teleop_planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "teleop/planner/collision.hpp"
#include "teleop/trajectory/primitive_generator.hpp"

namespace teleop::planner {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

constexpr double kMinBrakeDuration = 0.25;

}  // namespace

double primitive_duration(const PlannerParams& params, const Action& action,
                          const RefState& local_ref, double rotation) {
  if (!params.adaptive_duration) return params.duration;
  const Eigen::Vector3d desired =
      trajectory::endpoint_velocity(action, params.duration, rotation).head<3>();
  return trajectory::adaptive_duration(params.duration, params.duration_gain, desired,
                                       local_ref.velocity());
}

std::vector<MotionPrimitive> build_library(const ActionGrid& grid, const RefState& local_ref,
                                           const LocalFrame& frame,
                                           std::span<const double> durations) {
  if (grid.size() == 0) throw std::invalid_argument("empty action grid");
  if (durations.size() != grid.size()) {
    throw std::invalid_argument("need one duration per grid action");
  }
  const auto& generator = trajectory::PrimitiveGenerator::instance();
  std::vector<MotionPrimitive> library;
  library.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    library.push_back(generator.generate(local_ref, grid[i], durations[i], frame, grid.rotation()));
  }
  return library;
}

std::vector<MotionPrimitive> build_library(const ActionGrid& grid, const RefState& local_ref,
                                           const LocalFrame& frame, const PlannerParams& params) {
  std::vector<double> durations;
  durations.reserve(grid.size());
  for (const auto& action : grid.actions()) {
    durations.push_back(primitive_duration(params, action, local_ref, grid.rotation()));
  }
  return build_library(grid, local_ref, frame, durations);
}

MotionPrimitive emergency_stop_primitive(const RefState& local_ref, const LocalFrame& frame,
                                         double brake_acceleration) {
  if (!(brake_acceleration > 0.0)) throw std::invalid_argument("brake acceleration must be positive");
  const double speed = local_ref.velocity().norm();
  const double T = std::max(kMinBrakeDuration, 2.0 * speed / brake_acceleration);

  // x(t) = x0 + v0 t + a0 t^2 / 2 + j t^3 / 6 with j chosen so v(T) = 0.
  MotionPrimitive::Coefficients coeffs = MotionPrimitive::Coefficients::Zero();
  const Eigen::Vector4d& v0 = local_ref.derivs[1];
  const Eigen::Vector4d& a0 = local_ref.derivs[2];
  const Eigen::Vector4d jerk = -2.0 * (v0 + a0 * T) / (T * T);
  coeffs.col(0) = local_ref.derivs[0];
  coeffs.col(1) = v0;
  coeffs.col(2) = 0.5 * a0;
  coeffs.col(3) = jerk / 6.0;
  return MotionPrimitive(coeffs, T, Action{}, frame, 0.0, trajectory::PrimitiveKind::kEmergencyStop);
}

PruneResult prune_and_select(const ActionGrid& grid, const Action& joystick,
                             const RefState& local_ref, const LocalFrame& frame,
                             const mapping::NearestNeighborIndex& map,
                             const PlannerParams& params) {
  const auto& generator = trajectory::PrimitiveGenerator::instance();
  PruneResult result;
  ActionQueue queue(grid, joystick);
  result.operator_index = queue.top();
  result.operator_action = grid[result.operator_index];

  while (!queue.empty()) {
    const std::size_t index = queue.pop();
    const Action& action = grid[index];
    ++result.candidates_checked;

    const auto gen_start = Clock::now();
    MotionPrimitive candidate = generator.generate(
        local_ref, action, primitive_duration(params, action, local_ref, grid.rotation()), frame,
        grid.rotation());
    result.generation_ms += elapsed_ms(gen_start);

    const auto check_start = Clock::now();
    const ClearanceResult clearance =
        collision_check(candidate, map, params.collision_radius, params.vehicle_radius,
                        params.check_dt, /*stop_at_first_violation=*/true);
    result.pruning_ms += elapsed_ms(check_start);

    if (clearance.collision_free) {
      result.chosen = std::move(candidate);
      result.chosen_action = action;
      result.chosen_index = index;
      result.operator_action_pruned = index != result.operator_index;
      result.min_clearance = clearance.min_clearance;
      return result;
    }
  }

  // Nothing in the grid is free, not even stopping along the zero primitive.
  result.chosen = emergency_stop_primitive(local_ref, frame, params.brake_acceleration);
  result.chosen_action = Action{};
  result.chosen_index = grid.zero_index();
  result.operator_action_pruned = true;
  result.emergency_stop = true;
  result.min_clearance = collision_check(result.chosen, map, params.collision_radius,
                                         params.vehicle_radius, params.check_dt)
                             .min_clearance;
  return result;
}

}  // namespace teleop::planner
