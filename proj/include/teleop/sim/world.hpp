#pragma once

#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace teleop::sim {

/// Vertical cylinder (pillar) spanning [z_min, z_max].
struct Cylinder {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

/// Axis-aligned box.
struct Box {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
};

/// Zero-thickness vertical wall along a segment, unbounded in z.
struct Wall {
  Eigen::Vector2d from = Eigen::Vector2d::Zero();
  Eigen::Vector2d to = Eigen::Vector2d::Zero();
};

using Shape = std::variant<Cylinder, Box, Wall>;

struct Obstacle {
  Shape shape;
  // Present only within [active_from, active_until).
  double active_from = -std::numeric_limits<double>::infinity();
  double active_until = std::numeric_limits<double>::infinity();

  bool active_at(double t) const { return t >= active_from && t < active_until; }
};

struct DistanceResult {
  double distance = std::numeric_limits<double>::infinity();
  bool penetrating = false;
};

class World {
 public:
  /// Throws std::invalid_argument on non-finite or degenerate parameters.
  void add(const Obstacle& obstacle);
  void add(const Shape& shape) { add(Obstacle{shape}); }

  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  Eigen::Vector3d bounds_min = Eigen::Vector3d::Constant(-100.0);
  Eigen::Vector3d bounds_max = Eigen::Vector3d::Constant(100.0);

  /// Distance along a unit ray to the first surface hit within max_range.
  std::optional<double> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction,
                                double max_range, double t = 0.0) const;

  /// Exact distance to the nearest active obstacle surface; zero and
  /// flagged when inside a solid.
  DistanceResult distance(const Eigen::Vector3d& point, double t = 0.0) const;

 private:
  std::vector<Obstacle> obstacles_;
};

double min_obstacle_distance(const World& world, const Eigen::Vector3d& point, double t = 0.0);

// Per-shape primitives, exposed for tests.
DistanceResult shape_distance(const Shape& shape, const Eigen::Vector3d& point);
std::optional<double> shape_raycast(const Shape& shape, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction);

}  // namespace teleop::sim
