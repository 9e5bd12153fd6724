#pragma once

// Brute-force references for the pruning tests and the acceptance binary.

#include <cmath>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "teleop/mapping/kd_tree.hpp"
#include "teleop/planner/collision.hpp"
#include "teleop/planner/teleop_planner.hpp"
#include "teleop/trajectory/primitive_generator.hpp"

namespace teleop::testing {

/// Nearest collision-free grid action found by checking every action in
/// full, without the queue. Ties use the same (distance, |omega|, |vz|,
/// index) order.
inline std::optional<std::size_t> exhaustive_nearest_free(const planner::ActionGrid& grid,
                                                          const trajectory::Action& joystick,
                                                          const trajectory::RefState& ref,
                                                          const trajectory::LocalFrame& frame,
                                                          const mapping::NearestNeighborIndex& map,
                                                          const planner::PlannerParams& params) {
  const trajectory::Action target = grid.clamp(joystick);
  std::optional<std::size_t> best;
  std::tuple<double, double, double, std::size_t> best_key;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& a = grid[i];
    const auto mp = trajectory::generate_primitive(
        ref, a, planner::primitive_duration(params, a, ref, grid.rotation()), frame,
        grid.rotation());
    const auto check = planner::collision_check(mp, map, params.collision_radius,
                                                params.vehicle_radius, params.check_dt);
    if (!check.collision_free) continue;
    const double d = std::pow(target.vx - a.vx, 2) + std::pow(target.vz - a.vz, 2) +
                     std::pow(target.omega - a.omega, 2);
    const auto key = std::make_tuple(d, std::abs(a.omega), std::abs(a.vz), i);
    if (!best || key < best_key) {
      best = i;
      best_key = key;
    }
  }
  return best;
}

struct PruneScene {
  planner::ActionGridSpec grid;
  trajectory::Action joystick;
  trajectory::RefState ref;
  std::vector<Eigen::Vector3d> obstacles;
  planner::PlannerParams params;
};

/// Small grid, moving start state and a cluster of obstacle points ahead.
inline PruneScene random_prune_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(2, 5);
  PruneScene scene;
  scene.grid.vx = {0.0, 2.0 + 4.0 * u(rng), count(rng) + 1};
  const double w = 0.5 + 1.5 * u(rng);
  scene.grid.omega = {-w, w, 2 * count(rng) + 1};
  scene.grid.vz = {-0.5, 0.5, 3};
  scene.joystick = {scene.grid.vx.max * u(rng), 0.5 * (2.0 * u(rng) - 1.0),
                    w * (2.0 * u(rng) - 1.0)};
  scene.ref.derivs[1] = {1.5 * u(rng), 0.5 * (u(rng) - 0.5), 0.0, 0.3 * (u(rng) - 0.5)};
  scene.ref.derivs[2] = {u(rng) - 0.5, u(rng) - 0.5, 0.0, 0.0};
  const int clusters = 1 + static_cast<int>(u(rng) * 4);
  for (int c = 0; c < clusters; ++c) {
    const Eigen::Vector3d center(1.0 + 4.0 * u(rng), 3.0 * (u(rng) - 0.5), u(rng) - 0.5);
    for (int i = 0; i < 30; ++i) {
      scene.obstacles.push_back(center + 0.4 * Eigen::Vector3d(u(rng) - 0.5, u(rng) - 0.5,
                                                               u(rng) - 0.5));
    }
  }
  scene.params.duration = 1.0 + u(rng);
  scene.params.collision_radius = 0.2 + 0.3 * u(rng);
  scene.params.vehicle_radius = 0.3;
  scene.params.check_dt = 0.04;
  return scene;
}

}  // namespace teleop::testing
