#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "support/planner_oracle.hpp"
#include "teleop/mapping/kd_tree.hpp"
#include "teleop/planner/action_grid.hpp"
#include "teleop/planner/collision.hpp"
#include "teleop/planner/safe_velocity.hpp"
#include "teleop/planner/teleop_planner.hpp"
#include "teleop/trajectory/primitive_generator.hpp"

namespace teleop::planner {
namespace {

using Eigen::Vector3d;
using mapping::KdTree;

std::vector<Vector3d> pillar_points(const Eigen::Vector2d& center, double radius, double z0,
                                    double z1) {
  std::vector<Vector3d> pts;
  for (double z = z0; z <= z1; z += 0.1) {
    for (int k = 0; k < 64; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 64.0;
      pts.push_back({center.x() + radius * std::cos(a), center.y() + radius * std::sin(a), z});
    }
  }
  return pts;
}

TEST(SafeVelocity, PublishedBound) {
  EXPECT_NEAR(max_safe_velocity(6.0, 10.0, 0.1), 10.37, 0.01);
}

TEST(SafeVelocity, RootOfStoppingDistance) {
  EXPECT_DOUBLE_EQ(max_safe_velocity(6.0, 10.0, 0.0), std::sqrt(120.0));
  EXPECT_DOUBLE_EQ(max_safe_velocity(6.0, 0.0, 0.1), 0.0);
  for (double a : {1.0, 4.0, 9.0}) {
    for (double latency : {0.0, 0.05, 0.3}) {
      const double v = max_safe_velocity(a, 12.0, latency);
      EXPECT_NEAR(v * v / (2.0 * a) + v * latency, 12.0, 1e-9);
    }
  }
}

TEST(SafeVelocity, RejectsInvalid) {
  EXPECT_THROW(max_safe_velocity(0.0, 10.0, 0.1), std::invalid_argument);
  EXPECT_THROW(max_safe_velocity(6.0, -1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(max_safe_velocity(6.0, 10.0, -0.1), std::invalid_argument);
}

TEST(ActionGrid, DefaultLibraryHas1375Actions) {
  const ActionGrid grid;
  EXPECT_EQ(grid.size(), 1375u);
  const Action& zero = grid[grid.zero_index()];
  EXPECT_EQ(zero.vx, 0.0);
  EXPECT_EQ(zero.vz, 0.0);
  EXPECT_EQ(zero.omega, 0.0);
  EXPECT_EQ(build_library(grid, RefState{}, LocalFrame{}, PlannerParams{}).size(), 1375u);
}

TEST(ActionGrid, AxisValuesAreEvenAndExact) {
  const auto v = ActionGrid::axis_values({-2.0, 2.0, 11});
  ASSERT_EQ(v.size(), 11u);
  EXPECT_EQ(v.front(), -2.0);
  EXPECT_EQ(v[5], 0.0);
  EXPECT_EQ(v.back(), 2.0);
  EXPECT_NEAR(v[6] - v[5], 0.4, 1e-12);
}

TEST(ActionGrid, RequiresZeroAction) {
  EXPECT_THROW(ActionGrid(ActionGridSpec{{1.0, 3.0, 3}, {-1, 1, 3}, {-1, 1, 3}}),
               std::invalid_argument);
  EXPECT_THROW(ActionGrid(ActionGridSpec{{0.0, 3.0, 3}, {-1, 1, 2}, {-1, 1, 3}}),
               std::invalid_argument);
  EXPECT_THROW(ActionGrid(ActionGridSpec{{0.0, 3.0, 0}, {-1, 1, 3}, {-1, 1, 3}}),
               std::invalid_argument);
}

TEST(ActionQueue, SmallExampleOrder) {
  const ActionGrid grid(ActionGridSpec{{0, 2, 3}, {0, 0, 1}, {0, 0, 1}});
  EXPECT_EQ(nearest_action_order(grid, {1.4, 0, 0}), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_EQ(nearest_action_order(grid, {2.0, 0, 0}).front(), 2u);
}

TEST(ActionQueue, ClampsJoystick) {
  const ActionGrid grid(ActionGridSpec{{0, 2, 3}, {-1, 1, 3}, {0, 0, 1}});
  const auto order = nearest_action_order(grid, {50.0, 0.0, -9.0});
  const Action& first = grid[order.front()];
  EXPECT_EQ(first.vx, 2.0);
  EXPECT_EQ(first.omega, -1.0);
  const Action c = grid.clamp({-3.0, 7.0, 0.5});
  EXPECT_EQ(c.vx, 0.0);
  EXPECT_EQ(c.vz, 0.0);
  EXPECT_EQ(c.omega, 0.5);
}

TEST(ActionQueue, TieBreakPrefersStraightThenLevel) {
  const ActionGrid grid(ActionGridSpec{{0, 2, 3}, {-1, 1, 3}, {-1, 1, 3}});
  // Joystick at vx=1.5, omega=0.5, vz=0.5 is equidistant from several points.
  const auto order = nearest_action_order(grid, {1.5, 0.5, 0.5});
  const Action& first = grid[order[0]];
  EXPECT_EQ(first.omega, 0.0);
  EXPECT_EQ(first.vz, 0.0);
}

TEST(ActionQueue, MatchesFullSortOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> n(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const ActionGridSpec spec{{0.0, 1.0 + std::abs(u(rng)), n(rng) + 1},
                              {-1.0, 1.0, 2 * n(rng) + 1},
                              {-0.5, 0.5, 2 * n(rng) - 1}};
    const ActionGrid grid(spec);
    const Action joy{u(rng) * 2.0, u(rng), u(rng)};
    const Action t = grid.clamp(joy);
    std::vector<std::size_t> expected(grid.size());
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = i;
    auto key = [&](std::size_t i) {
      const Action& a = grid[i];
      const double d = (t.vx - a.vx) * (t.vx - a.vx) + (t.vz - a.vz) * (t.vz - a.vz) +
                       (t.omega - a.omega) * (t.omega - a.omega);
      return std::make_tuple(d, std::abs(a.omega), std::abs(a.vz), i);
    };
    std::sort(expected.begin(), expected.end(),
              [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    EXPECT_EQ(nearest_action_order(grid, joy), expected) << "trial " << trial;
  }
}

TEST(Collision, SampleTimesIncludeDuration) {
  EXPECT_EQ(sample_times(0.1, 0.04), (std::vector<double>{0.0, 0.04, 0.08, 0.1}));
  const auto t = sample_times(1.0, 0.25);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_THROW(sample_times(1.0, 0.0), std::invalid_argument);
}

TEST(Collision, EmptyMapIsFree) {
  const auto mp = trajectory::generate_primitive(RefState{}, {2, 0, 0}, 1.5, LocalFrame{});
  const KdTree empty;
  const auto r = collision_check(mp, empty, 0.4, 0.35, 0.04);
  EXPECT_TRUE(r.collision_free);
  EXPECT_TRUE(std::isinf(r.min_clearance));
}

TEST(Collision, BoundaryDistanceIsClear) {
  const auto hover = trajectory::generate_primitive(RefState{}, {}, 1.5, LocalFrame{});
  const KdTree at_limit(std::vector<Vector3d>{{0.75, 0.0, 0.0}});
  EXPECT_TRUE(collision_check(hover, at_limit, 0.5, 0.25, 0.04).collision_free);
  const KdTree inside(std::vector<Vector3d>{{0.7499, 0.0, 0.0}});
  const auto r = collision_check(hover, inside, 0.5, 0.25, 0.04);
  EXPECT_FALSE(r.collision_free);
  EXPECT_DOUBLE_EQ(r.min_clearance, 0.7499);
}

TEST(Collision, AgreesWithDenseSampling) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int decided = 0;
  for (int trial = 0; trial < 300; ++trial) {
    RefState ref;
    ref.derivs[1] = {2.0 * u(rng), u(rng), 0.3 * u(rng), 0.5 * u(rng)};
    const Action a{5.0 + 4.0 * u(rng), 0.5 * u(rng), 1.5 * u(rng)};
    const auto mp = trajectory::generate_primitive(ref, a, 1.5, LocalFrame{});
    std::vector<Vector3d> cloud;
    for (int i = 0; i < 40; ++i) cloud.push_back({4.0 + 4.0 * u(rng), 4.0 * u(rng), u(rng)});
    const KdTree map(cloud);
    const double dt = 0.04, r = 0.3, rv = 0.3;
    const auto coarse = collision_check(mp, map, r, rv, dt);
    const auto fine = collision_check(mp, map, r, rv, dt / 100.0);
    double vmax = 0.0;
    for (double t : sample_times(mp.duration(), dt / 100.0)) {
      vmax = std::max(vmax, mp.to_world(t, 1).head<3>().norm());
    }
    EXPECT_GE(coarse.min_clearance, fine.min_clearance - 1e-12);
    if (fine.min_clearance >= r + rv) {
      EXPECT_TRUE(coarse.collision_free);
      ++decided;
    } else if (fine.min_clearance < r + rv - vmax * dt / 2.0) {
      EXPECT_FALSE(coarse.collision_free);
      ++decided;
    }
  }
  EXPECT_GT(decided, 250);
}

TEST(Planner, FreeSpaceKeepsOperatorAction) {
  const ActionGrid grid;
  const KdTree empty;
  const auto result =
      prune_and_select(grid, {7.3, 0.1, -0.5}, RefState{}, LocalFrame{}, empty, PlannerParams{});
  EXPECT_FALSE(result.operator_action_pruned);
  EXPECT_FALSE(result.emergency_stop);
  EXPECT_EQ(result.chosen_index, result.operator_index);
  EXPECT_EQ(result.candidates_checked, 1u);
  EXPECT_NEAR(result.chosen_action.vx, 7.5, 1e-12);
  EXPECT_NEAR(result.chosen_action.omega, -0.4, 1e-12);
}

TEST(Planner, PillarAheadDeviatesInYawRate) {
  const ActionGrid grid;
  const KdTree map(pillar_points({6.0, 0.0}, 0.5, -2.0, 2.0));
  RefState ref;
  ref.derivs[1] = {4.0, 0.0, 0.0, 0.0};
  PlannerParams params;
  params.collision_radius = 0.2;
  const auto result = prune_and_select(grid, {10.0, 0.0, 0.0}, ref, LocalFrame{}, map, params);
  ASSERT_TRUE(result.operator_action_pruned);
  EXPECT_FALSE(result.emergency_stop);
  EXPECT_NE(result.chosen_action.omega, 0.0);
  const auto oracle =
      testing::exhaustive_nearest_free(grid, {10.0, 0.0, 0.0}, ref, LocalFrame{}, map, params);
  ASSERT_TRUE(oracle);
  EXPECT_EQ(result.chosen_index, *oracle);
  EXPECT_GE(result.min_clearance, params.collision_radius + params.vehicle_radius);
}

TEST(Planner, MatchesExhaustiveScanOnRandomScenes) {
  std::mt19937_64 rng(31);
  int pruned = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto scene = testing::random_prune_scene(rng);
    const ActionGrid grid(scene.grid);
    const KdTree map(scene.obstacles);
    const auto result =
        prune_and_select(grid, scene.joystick, scene.ref, LocalFrame{}, map, scene.params);
    const auto oracle = testing::exhaustive_nearest_free(grid, scene.joystick, scene.ref,
                                                         LocalFrame{}, map, scene.params);
    EXPECT_LE(result.candidates_checked, grid.size());
    if (oracle) {
      EXPECT_FALSE(result.emergency_stop);
      EXPECT_EQ(result.chosen_index, *oracle) << "trial " << trial;
    } else {
      EXPECT_TRUE(result.emergency_stop);
    }
    pruned += result.operator_action_pruned;
  }
  EXPECT_GT(pruned, 10);
}

TEST(Planner, DeterministicResult) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto scene = testing::random_prune_scene(rng);
    const ActionGrid grid(scene.grid);
    const KdTree map(scene.obstacles);
    const auto a = prune_and_select(grid, scene.joystick, scene.ref, LocalFrame{}, map, scene.params);
    const auto b = prune_and_select(grid, scene.joystick, scene.ref, LocalFrame{}, map, scene.params);
    EXPECT_EQ(a.chosen_index, b.chosen_index);
    EXPECT_EQ(a.candidates_checked, b.candidates_checked);
    EXPECT_EQ(a.emergency_stop, b.emergency_stop);
    EXPECT_EQ(a.chosen.coefficients(), b.chosen.coefficients());
    EXPECT_EQ(a.min_clearance, b.min_clearance);
  }
}

TEST(Planner, NonEmergencyChoiceIsClear) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const auto scene = testing::random_prune_scene(rng);
    const ActionGrid grid(scene.grid);
    const KdTree map(scene.obstacles);
    const auto r = prune_and_select(grid, scene.joystick, scene.ref, LocalFrame{}, map, scene.params);
    if (r.emergency_stop) continue;
    const auto check = collision_check(r.chosen, map, scene.params.collision_radius,
                                       scene.params.vehicle_radius, scene.params.check_dt);
    EXPECT_TRUE(check.collision_free);
    EXPECT_GE(check.min_clearance, scene.params.collision_radius + scene.params.vehicle_radius);
  }
}

TEST(Planner, ZeroActionAlwaysEndsAtRest) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto scene = testing::random_prune_scene(rng);
    const ActionGrid grid(scene.grid, 0.3 * trial);
    const auto lib = build_library(grid, scene.ref, LocalFrame{}, scene.params);
    const auto& zero = lib[grid.zero_index()];
    EXPECT_LE(zero.evaluate(zero.duration(), 1).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Planner, BoxedInFallsBackToEmergencyStop) {
  std::vector<Vector3d> box;
  for (double a = -0.6; a <= 0.6 + 1e-9; a += 0.1) {
    for (double b = -0.6; b <= 0.6 + 1e-9; b += 0.1) {
      box.push_back({0.6, a, b});
      box.push_back({-0.6, a, b});
      box.push_back({a, 0.6, b});
      box.push_back({a, -0.6, b});
      box.push_back({a, b, 0.6});
      box.push_back({a, b, -0.6});
    }
  }
  const KdTree map(box);
  RefState ref;
  ref.derivs[1] = {1.0, 0.0, 0.0, 0.0};
  const ActionGrid grid;
  const auto result = prune_and_select(grid, {10.0, 0.0, 0.0}, ref, LocalFrame{}, map, PlannerParams{});
  EXPECT_TRUE(result.emergency_stop);
  EXPECT_TRUE(result.operator_action_pruned);
  EXPECT_EQ(result.candidates_checked, grid.size());
  EXPECT_EQ(result.chosen.kind(), trajectory::PrimitiveKind::kEmergencyStop);
  EXPECT_EQ(result.chosen_action.vx, 0.0);
}

TEST(EmergencyStop, BrakesToRestWithinLimit) {
  RefState ref;
  ref.derivs[1] = {8.0, -1.0, 0.5, 0.7};
  ref.derivs[2] = {1.0, 0.0, 0.0, 0.0};
  const auto mp = emergency_stop_primitive(ref, LocalFrame{}, 6.0);
  const double T = mp.duration();
  EXPECT_NEAR(T, 2.0 * ref.velocity().norm() / 6.0, 1e-12);
  EXPECT_LE(mp.evaluate(T, 1).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((mp.evaluate(0.0, 0) - ref.derivs[0]).norm(), 1e-15);
  EXPECT_LE((mp.evaluate(0.0, 1) - ref.derivs[1]).norm(), 1e-15);
  EXPECT_THROW(emergency_stop_primitive(ref, LocalFrame{}, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace teleop::planner
