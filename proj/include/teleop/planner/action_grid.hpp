#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "teleop/trajectory/types.hpp"

namespace teleop::planner {

using trajectory::Action;

struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
};

/// Discretization of the action space. Defaults are the 25 x 11 x 5 library.
struct ActionGridSpec {
  AxisSpec vx{0.0, 10.0, 25};
  AxisSpec omega{-2.0, 2.0, 11};
  AxisSpec vz{-1.0, 1.0, 5};
};

/// Evenly spaced actions, flattened vx-major, then omega, then vz.
///
/// Construction fails unless every axis contains zero, so the stopping action
/// is always available to the pruner.
class ActionGrid {
 public:
  explicit ActionGrid(const ActionGridSpec& spec = {}, double rotation = 0.0);

  std::size_t size() const { return actions_.size(); }
  const Action& operator[](std::size_t i) const { return actions_[i]; }
  std::span<const Action> actions() const { return actions_; }
  std::size_t zero_index() const { return zero_index_; }
  const ActionGridSpec& spec() const { return spec_; }

  /// Library rotation about the frame z-axis, radians.
  double rotation() const { return rotation_; }
  void set_rotation(double rotation) { rotation_ = rotation; }

  /// Clamps each component to the grid bounds.
  Action clamp(const Action& action) const;

  /// Values along one axis; zero is snapped exactly when within rounding.
  static std::vector<double> axis_values(const AxisSpec& axis);

 private:
  ActionGridSpec spec_;
  std::vector<Action> actions_;
  std::size_t zero_index_ = 0;
  double rotation_ = 0.0;
};

/// Lazily ordered queue of grid indices by ascending Euclidean distance to the
/// (clamped) joystick action. Equal distances prefer smaller |omega|, then
/// smaller |vz|, then the smaller grid index.
class ActionQueue {
 public:
  ActionQueue(const ActionGrid& grid, const Action& joystick);

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::size_t pop();
  std::size_t top() const { return heap_.front().index; }

 private:
  struct Entry {
    double distance_sq;
    double abs_omega;
    double abs_vz;
    std::size_t index;
  };
  static bool later(const Entry& a, const Entry& b);

  std::vector<Entry> heap_;
};

/// All grid indices in queue order.
std::vector<std::size_t> nearest_action_order(const ActionGrid& grid, const Action& joystick);

}  // namespace teleop::planner
