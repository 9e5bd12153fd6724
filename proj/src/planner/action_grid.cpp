#include "teleop/planner/action_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace teleop::planner {

std::vector<double> ActionGrid::axis_values(const AxisSpec& axis) {
  if (axis.count < 1) throw std::invalid_argument("action axis needs at least one value");
  if (!(axis.min <= axis.max)) throw std::invalid_argument("action axis bounds are inverted");
  std::vector<double> values;
  if (axis.count == 1) {
    values.push_back(0.5 * (axis.min + axis.max));
  } else {
    const double step = (axis.max - axis.min) / (axis.count - 1);
    for (int i = 0; i < axis.count; ++i) values.push_back(axis.min + step * i);
    values.back() = axis.max;
  }
  const double snap = 1e-9 * std::max({1.0, std::abs(axis.min), std::abs(axis.max)});
  for (double& v : values) {
    if (std::abs(v) <= snap) v = 0.0;
  }
  return values;
}

ActionGrid::ActionGrid(const ActionGridSpec& spec, double rotation)
    : spec_(spec), rotation_(rotation) {
  const auto vx = axis_values(spec.vx);
  const auto omega = axis_values(spec.omega);
  const auto vz = axis_values(spec.vz);
  for (const auto* axis : {&vx, &omega, &vz}) {
    if (std::find(axis->begin(), axis->end(), 0.0) == axis->end()) {
      throw std::invalid_argument("action grid must contain the zero action");
    }
  }
  actions_.reserve(vx.size() * omega.size() * vz.size());
  for (double a : vx) {
    for (double w : omega) {
      for (double c : vz) {
        if (a == 0.0 && w == 0.0 && c == 0.0) zero_index_ = actions_.size();
        actions_.push_back({a, c, w});
      }
    }
  }
}

Action ActionGrid::clamp(const Action& action) const {
  return {std::clamp(action.vx, spec_.vx.min, spec_.vx.max),
          std::clamp(action.vz, spec_.vz.min, spec_.vz.max),
          std::clamp(action.omega, spec_.omega.min, spec_.omega.max)};
}

bool ActionQueue::later(const Entry& a, const Entry& b) {
  return std::tie(a.distance_sq, a.abs_omega, a.abs_vz, a.index) >
         std::tie(b.distance_sq, b.abs_omega, b.abs_vz, b.index);
}

ActionQueue::ActionQueue(const ActionGrid& grid, const Action& joystick) {
  const Action target = grid.clamp(joystick);
  heap_.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Action& a = grid[i];
    const double dvx = target.vx - a.vx;
    const double dvz = target.vz - a.vz;
    const double dw = target.omega - a.omega;
    heap_.push_back({dvx * dvx + dvz * dvz + dw * dw, std::abs(a.omega), std::abs(a.vz), i});
  }
  std::make_heap(heap_.begin(), heap_.end(), later);
}

std::size_t ActionQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), later);
  const std::size_t index = heap_.back().index;
  heap_.pop_back();
  return index;
}

std::vector<std::size_t> nearest_action_order(const ActionGrid& grid, const Action& joystick) {
  ActionQueue queue(grid, joystick);
  std::vector<std::size_t> order;
  order.reserve(grid.size());
  while (!queue.empty()) order.push_back(queue.pop());
  return order;
}

}  // namespace teleop::planner
