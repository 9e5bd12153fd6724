#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "teleop/mapping/local_map.hpp"
#include "teleop/planner/action_grid.hpp"
#include "teleop/planner/teleop_planner.hpp"
#include "teleop/session/metrics.hpp"
#include "teleop/session/operator_input.hpp"
#include "teleop/sim/scenario.hpp"

namespace teleop::session {

/// Event kinds in tie-break order for equal stamps.
enum class EventKind : int {
  kSensor = 0,
  kMap = 1,
  kPlan = 2,
  kAudit = 3,
};

/// Fixed-rate event streams merged in stamp order. Event k of a stream with
/// rate f fires at round(k * 1e9 / f) ns, so there is no accumulated drift
/// and exactly f events land in every simulated second for integer f.
class EventScheduler {
 public:
  struct Event {
    EventKind kind;
    std::size_t stream;
    std::size_t tag;  // sensor index for sensor streams
    std::int64_t time_ns;
    double time() const { return static_cast<double>(time_ns) * 1e-9; }
  };

  std::size_t add_stream(EventKind kind, double rate, std::size_t tag = 0);
  Event peek() const;
  Event pop();
  bool empty() const { return streams_.empty(); }

 private:
  struct Stream {
    EventKind kind;
    double rate;
    std::size_t tag;
    std::uint64_t count = 0;
    std::int64_t next_ns() const;
  };
  std::vector<Stream> streams_;
};

/// Everything produced by one planning cycle.
struct PlanCycle {
  double stamp = 0.0;
  OperatorCommand command;
  trajectory::RefState local_ref;
  trajectory::LocalFrame frame;
  planner::PruneResult result;
  MetricsRecord record;
};

class ClosedLoop;

/// Hooks for telemetry; called on the loop thread.
class LoopObserver {
 public:
  virtual ~LoopObserver() = default;
  virtual void on_map(const ClosedLoop&) {}
  virtual void on_plan(const ClosedLoop&, const PlanCycle&) {}
  virtual void on_audit(const ClosedLoop&) {}
};

/// Deterministic simulation core: sensors, mapping, planning and
/// ground-truth auditing driven by one event clock. The vehicle is advanced
/// to each event's stamp before the event is handled.
class ClosedLoop {
 public:
  ClosedLoop(sim::Scenario scenario, OperatorInput& input);

  void set_observer(LoopObserver* observer) { observer_ = observer; }
  void set_metrics_sink(std::function<void(const MetricsRecord&)> sink) {
    metrics_sink_ = std::move(sink);
  }

  /// Handles the next event and returns its kind.
  EventKind step();

  /// Handles every event stamped strictly before `t_end`.
  void run_until(double t_end);

  /// Stamp of the next pending event.
  double next_event_time() const { return scheduler_.peek().time(); }

  double now() const { return now_; }
  const sim::Scenario& scenario() const { return scenario_; }
  const sim::VehicleState& vehicle() const { return vehicle_; }
  const mapping::LocalMap& local_map() const { return map_; }
  const mapping::MapSnapshot& map_snapshot() const { return snapshot_; }
  const planner::ActionGrid& grid() const { return grid_; }
  const trajectory::MotionPrimitive& active_primitive() const { return active_; }
  const std::optional<PlanCycle>& last_plan() const { return last_plan_; }
  const std::vector<MetricsRecord>& records() const { return records_; }
  std::size_t event_count(EventKind kind) const { return counts_[static_cast<int>(kind)]; }

  /// Summary over everything run so far.
  SessionSummary summary() const;

 private:
  void advance_vehicle(double t);
  void handle_sensor(std::size_t sensor, double t);
  void handle_map(double t);
  void handle_plan(double t);
  void handle_audit(double t);

  sim::Scenario scenario_;
  OperatorInput& input_;
  EventScheduler scheduler_;
  planner::ActionGrid grid_;
  mapping::LocalMap map_;
  mapping::MapSnapshot snapshot_;
  sim::VehicleState vehicle_;
  trajectory::MotionPrimitive active_;
  double active_start_ = 0.0;
  double now_ = 0.0;
  std::vector<mapping::SensorScan> pending_scans_;
  std::optional<PlanCycle> last_plan_;
  std::vector<MetricsRecord> records_;
  std::array<std::size_t, 4> counts_{};
  double last_map_ms_ = 0.0;
  LoopObserver* observer_ = nullptr;
  std::function<void(const MetricsRecord&)> metrics_sink_;

  SessionSummary summary_;
};

}  // namespace teleop::session
