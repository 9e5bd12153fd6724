#include "teleop/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace teleop::sim {

namespace {

constexpr double kRayEpsilon = 1e-9;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double segment_distance_2d(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                           const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len_sq = ab.squaredNorm();
  const double s = len_sq > 0.0 ? std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

struct DistanceVisitor {
  const Eigen::Vector3d& p;

  DistanceResult operator()(const Cylinder& c) const {
    const double radial = std::max(0.0, (p.head<2>() - c.center).norm() - c.radius);
    const double vertical = std::max({0.0, c.z_min - p.z(), p.z() - c.z_max});
    const double d = std::hypot(radial, vertical);
    return {d, d == 0.0};
  }

  DistanceResult operator()(const Box& b) const {
    const Eigen::Vector3d outside =
        (b.min - p).cwiseMax(p - b.max).cwiseMax(Eigen::Vector3d::Zero());
    const double d = outside.norm();
    return {d, d == 0.0};
  }

  DistanceResult operator()(const Wall& w) const {
    return {segment_distance_2d(p.head<2>(), w.from, w.to), false};
  }
};

struct RayVisitor {
  const Eigen::Vector3d& o;
  const Eigen::Vector3d& d;

  std::optional<double> operator()(const Cylinder& c) const {
    std::optional<double> best;
    auto consider = [&best](double t) {
      if (t > kRayEpsilon && (!best || t < *best)) best = t;
    };
    const Eigen::Vector2d f = o.head<2>() - c.center;
    const double a = d.head<2>().squaredNorm();
    if (a > 0.0) {
      const double b = 2.0 * f.dot(d.head<2>());
      const double cc = f.squaredNorm() - c.radius * c.radius;
      const double disc = b * b - 4.0 * a * cc;
      if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        for (double t : {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)}) {
          const double z = o.z() + t * d.z();
          if (z >= c.z_min && z <= c.z_max) consider(t);
        }
      }
    }
    if (d.z() != 0.0) {
      for (double z_cap : {c.z_min, c.z_max}) {
        const double t = (z_cap - o.z()) / d.z();
        const Eigen::Vector2d xy = o.head<2>() + t * d.head<2>();
        if ((xy - c.center).squaredNorm() <= c.radius * c.radius) consider(t);
      }
    }
    return best;
  }

  std::optional<double> operator()(const Box& b) const {
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
      if (d[axis] == 0.0) {
        if (o[axis] < b.min[axis] || o[axis] > b.max[axis]) return std::nullopt;
        continue;
      }
      double t0 = (b.min[axis] - o[axis]) / d[axis];
      double t1 = (b.max[axis] - o[axis]) / d[axis];
      if (t0 > t1) std::swap(t0, t1);
      t_enter = std::max(t_enter, t0);
      t_exit = std::min(t_exit, t1);
    }
    if (t_exit < t_enter || t_exit <= kRayEpsilon) return std::nullopt;
    return t_enter > kRayEpsilon ? t_enter : t_exit;
  }

  std::optional<double> operator()(const Wall& w) const {
    const Eigen::Vector2d dir = d.head<2>();
    const Eigen::Vector2d edge = w.to - w.from;
    const double denom = cross2(dir, edge);
    if (std::abs(denom) < 1e-12) return std::nullopt;
    const Eigen::Vector2d rel = w.from - o.head<2>();
    const double t = cross2(rel, edge) / denom;
    const double s = cross2(rel, dir) / denom;
    if (t <= kRayEpsilon || s < 0.0 || s > 1.0) return std::nullopt;
    return t;
  }
};

bool finite_shape(const Shape& shape) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Cylinder>) {
          return s.center.allFinite() && std::isfinite(s.radius) && s.radius > 0.0 &&
                 std::isfinite(s.z_min) && std::isfinite(s.z_max) && s.z_max > s.z_min;
        } else if constexpr (std::is_same_v<T, Box>) {
          return s.min.allFinite() && s.max.allFinite() && (s.max - s.min).minCoeff() > 0.0;
        } else {
          return s.from.allFinite() && s.to.allFinite() && (s.to - s.from).norm() > 0.0;
        }
      },
      shape);
}

}  // namespace

DistanceResult shape_distance(const Shape& shape, const Eigen::Vector3d& point) {
  return std::visit(DistanceVisitor{point}, shape);
}

std::optional<double> shape_raycast(const Shape& shape, const Eigen::Vector3d& origin,
                                    const Eigen::Vector3d& direction) {
  return std::visit(RayVisitor{origin, direction}, shape);
}

void World::add(const Obstacle& obstacle) {
  if (!finite_shape(obstacle.shape)) {
    throw std::invalid_argument("obstacle parameters must be finite with positive extents");
  }
  obstacles_.push_back(obstacle);
}

std::optional<double> World::raycast(const Eigen::Vector3d& origin,
                                     const Eigen::Vector3d& direction, double max_range,
                                     double t) const {
  std::optional<double> best;
  for (const auto& obstacle : obstacles_) {
    if (!obstacle.active_at(t)) continue;
    const auto hit = shape_raycast(obstacle.shape, origin, direction);
    if (hit && *hit <= max_range && (!best || *hit < *best)) best = hit;
  }
  return best;
}

DistanceResult World::distance(const Eigen::Vector3d& point, double t) const {
  DistanceResult best;
  for (const auto& obstacle : obstacles_) {
    if (!obstacle.active_at(t)) continue;
    const DistanceResult r = shape_distance(obstacle.shape, point);
    if (r.distance < best.distance) best.distance = r.distance;
    best.penetrating = best.penetrating || r.penetrating;
  }
  return best;
}

double min_obstacle_distance(const World& world, const Eigen::Vector3d& point, double t) {
  return world.distance(point, t).distance;
}

}  // namespace teleop::sim
