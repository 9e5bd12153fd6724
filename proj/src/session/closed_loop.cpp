#include "teleop/session/closed_loop.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "teleop/sim/depth_sensor.hpp"
#include "teleop/trajectory/primitive_generator.hpp"

namespace teleop::session {

std::int64_t EventScheduler::Stream::next_ns() const {
  return std::llround(static_cast<double>(count) * 1e9 / rate);
}

std::size_t EventScheduler::add_stream(EventKind kind, double rate, std::size_t tag) {
  if (!(rate > 0.0)) throw std::invalid_argument("event rate must be positive");
  streams_.push_back({kind, rate, tag});
  return streams_.size() - 1;
}

EventScheduler::Event EventScheduler::peek() const {
  if (streams_.empty()) throw std::logic_error("no event streams");
  std::size_t best = 0;
  for (std::size_t i = 1; i < streams_.size(); ++i) {
    const auto key = [&](std::size_t s) {
      return std::make_tuple(streams_[s].next_ns(), static_cast<int>(streams_[s].kind), s);
    };
    if (key(i) < key(best)) best = i;
  }
  const Stream& s = streams_[best];
  return {s.kind, best, s.tag, s.next_ns()};
}

EventScheduler::Event EventScheduler::pop() {
  const Event e = peek();
  ++streams_[e.stream].count;
  return e;
}

ClosedLoop::ClosedLoop(sim::Scenario scenario, OperatorInput& input)
    : scenario_(std::move(scenario)),
      input_(input),
      grid_(scenario_.grid, scenario_.rotation),
      map_(scenario_.map) {
  scenario_.validate();
  for (std::size_t i = 0; i < scenario_.sensors.size(); ++i) {
    scheduler_.add_stream(EventKind::kSensor, scenario_.sensors[i].rate, i);
  }
  scheduler_.add_stream(EventKind::kMap, scenario_.rates.map);
  scheduler_.add_stream(EventKind::kPlan, scenario_.rates.plan);
  scheduler_.add_stream(EventKind::kAudit, scenario_.rates.audit);

  vehicle_ = scenario_.start;
  vehicle_.stamp = 0.0;
  const auto ref = trajectory::RefState::at_rest(vehicle_.position, vehicle_.yaw);
  const auto regen = trajectory::regenerate_from(ref, 0.0);
  active_ = trajectory::generate_primitive(regen.local_ref, {}, scenario_.planner.duration,
                                           regen.frame);

  summary_.scenario = scenario_.name;
  summary_.min_ground_truth_clearance = std::numeric_limits<double>::infinity();
}

EventKind ClosedLoop::step() {
  const auto event = scheduler_.pop();
  const double t = event.time();
  advance_vehicle(t);
  now_ = t;
  ++counts_[static_cast<int>(event.kind)];
  switch (event.kind) {
    case EventKind::kSensor:
      handle_sensor(event.tag, t);
      break;
    case EventKind::kMap:
      handle_map(t);
      break;
    case EventKind::kPlan:
      handle_plan(t);
      break;
    case EventKind::kAudit:
      handle_audit(t);
      break;
  }
  return event.kind;
}

void ClosedLoop::run_until(double t_end) {
  const auto end_ns = std::llround(t_end * 1e9);
  while (scheduler_.peek().time_ns < end_ns) step();
}

void ClosedLoop::advance_vehicle(double t) {
  vehicle_ = sim::step_vehicle(vehicle_, active_, active_start_, t, scenario_.tracking);
}

void ClosedLoop::handle_sensor(std::size_t sensor, double t) {
  pending_scans_.push_back(
      sim::raycast_scan(scenario_.world, vehicle_.body_pose(), scenario_.sensors[sensor], t));
}

void ClosedLoop::handle_map(double t) {
  (void)t;
  if (pending_scans_.empty()) return;
  const auto start = std::chrono::steady_clock::now();
  // Scans sharing a stamp form one sensor frame.
  std::size_t begin = 0;
  while (begin < pending_scans_.size()) {
    std::size_t end = begin + 1;
    while (end < pending_scans_.size() && pending_scans_[end].stamp == pending_scans_[begin].stamp) {
      ++end;
    }
    map_.integrate(std::span(pending_scans_).subspan(begin, end - begin));
    begin = end;
  }
  pending_scans_.clear();
  snapshot_ = map_.snapshot();
  last_map_ms_ =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  summary_.map_ms.add(last_map_ms_);
  ++summary_.map_updates;
  if (observer_) observer_->on_map(*this);
}

void ClosedLoop::handle_plan(double t) {
  PlanCycle cycle;
  cycle.stamp = t;
  cycle.command = input_.command_at(t);

  const trajectory::RefState world_ref = active_.reference_at(t - active_start_);
  const auto regen = trajectory::regenerate_from(world_ref, t);
  cycle.local_ref = regen.local_ref;
  cycle.frame = regen.frame;
  grid_.set_rotation(scenario_.rotation + cycle.command.rotation);
  cycle.result = planner::prune_and_select(grid_, cycle.command.action, regen.local_ref,
                                           regen.frame, snapshot_, scenario_.planner);
  // A running emergency stop is kept rather than restarted, so braking
  // completes even while every grid action stays blocked.
  const bool keep_braking = cycle.result.emergency_stop &&
                            active_.kind() == trajectory::PrimitiveKind::kEmergencyStop;
  if (keep_braking) {
    cycle.result.chosen = active_;
  } else {
    active_ = cycle.result.chosen;
    active_start_ = t;
  }

  MetricsRecord& rec = cycle.record;
  rec.stamp = t;
  rec.operator_action = cycle.command.action;
  rec.chosen_action = cycle.result.chosen_action;
  rec.pruned = cycle.result.operator_action_pruned;
  rec.emergency = cycle.result.emergency_stop;
  rec.candidates = cycle.result.candidates_checked;
  rec.min_clearance = cycle.result.min_clearance;
  rec.ground_truth_clearance = sim::min_obstacle_distance(scenario_.world, vehicle_.position, t);
  rec.speed = vehicle_.velocity.norm();
  rec.acceleration = vehicle_.acceleration.norm();
  rec.generation_ms = cycle.result.generation_ms;
  rec.pruning_ms = cycle.result.pruning_ms;
  rec.map_ms = last_map_ms_;

  ++summary_.plan_cycles;
  summary_.pruned_cycles += rec.pruned ? 1 : 0;
  summary_.emergency_cycles += rec.emergency ? 1 : 0;
  summary_.generation_ms.add(rec.generation_ms);
  summary_.pruning_ms.add(rec.pruning_ms);

  records_.push_back(rec);
  if (metrics_sink_) metrics_sink_(rec);
  last_plan_ = std::move(cycle);
  if (observer_) observer_->on_plan(*this, *last_plan_);
}

void ClosedLoop::handle_audit(double t) {
  const auto d = scenario_.world.distance(vehicle_.position, t);
  summary_.min_ground_truth_clearance = std::min(summary_.min_ground_truth_clearance, d.distance);
  summary_.penetrated = summary_.penetrated || d.penetrating;
  summary_.max_speed = std::max(summary_.max_speed, vehicle_.velocity.norm());
  summary_.max_acceleration = std::max(summary_.max_acceleration, vehicle_.acceleration.norm());
  if (observer_) observer_->on_audit(*this);
}

SessionSummary ClosedLoop::summary() const {
  SessionSummary s = summary_;
  s.sim_duration = now_;
  s.keyframes = map_.counters().keyframes;
  s.subframes = map_.counters().subframes;
  s.bufferframes = map_.counters().bufferframes;
  return s;
}

}  // namespace teleop::session
