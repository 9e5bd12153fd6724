#include "teleop/session/session.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "teleop/planner/teleop_planner.hpp"
#include "teleop/session/bounded_queue.hpp"
#include "teleop/session/closed_loop.hpp"
#include "teleop/session/protocol_server.hpp"
#include "teleop/session/wire_protocol.hpp"

namespace teleop::session {

sim::Scenario load_scenario_with_overrides(const std::filesystem::path& path,
                                           const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("scenario " + path.string() + ": " + e.what());
  }
  if (overrides.seed) doc["seed"] = *overrides.seed;
  sim::Scenario s = sim::parse_scenario(doc, path.parent_path());
  if (overrides.collision_radius) s.planner.collision_radius = *overrides.collision_radius;
  if (overrides.vehicle_radius) s.planner.vehicle_radius = *overrides.vehicle_radius;
  if (overrides.duration_T) s.planner.duration = *overrides.duration_T;
  if (overrides.v_max) s.grid.vx.max = *overrides.v_max;
  if (overrides.voxel_size) s.map.voxel_size = *overrides.voxel_size;
  if (overrides.session_duration) s.duration = *overrides.session_duration;
  s.validate();
  return s;
}

std::filesystem::path summary_path_for(const std::filesystem::path& metrics) {
  auto p = metrics;
  p.replace_extension(".summary.json");
  return p;
}

namespace {

std::vector<Eigen::Vector3d> sample_world(const trajectory::MotionPrimitive& mp, int samples) {
  std::vector<Eigen::Vector3d> points;
  points.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double tau = samples > 1 ? mp.duration() * i / (samples - 1) : 0.0;
    points.push_back(mp.world_position(tau));
  }
  return points;
}

/// Turns loop events into decimated wire messages.
class TelemetryPublisher final : public LoopObserver {
 public:
  TelemetryPublisher(BoundedQueue<std::string>& queue, const ProtocolServer& server,
                     const TelemetryRates& rates)
      : queue_(queue), server_(server), rates_(rates) {}

  void on_map(const ClosedLoop& loop) override {
    if (!due(next_map_, rates_.map_hz, loop.now())) return;
    auto keys = loop.map_snapshot().voxel_keys();
    std::lock_guard lock(mutex_);
    const MapDiff diff = tracker_.update(std::move(keys));
    voxel_size_ = loop.scenario().map.voxel_size;
    if (diff.add.empty() && diff.remove.empty()) return;
    if (server_.client_count() == 0) return;
    queue_.push(encode_map_diff(diff, voxel_size_, tracker_.sent()));
  }

  void on_plan(const ClosedLoop& loop, const PlanCycle& cycle) override {
    last_command_ = cycle.command;
    last_pruned_ = cycle.result.operator_action_pruned;
    last_emergency_ = cycle.result.emergency_stop;
    last_clearance_ = cycle.record.ground_truth_clearance;
    if (server_.client_count() == 0) return;
    queue_.push(encode_trajectory(sample_world(cycle.result.chosen, rates_.trajectory_samples),
                                  cycle.result.chosen_action, last_pruned_, last_emergency_));
    if (!due(next_library_, rates_.library_hz, loop.now())) return;
    const auto library =
        planner::build_library(loop.grid(), cycle.local_ref, cycle.frame, loop.scenario().planner);
    std::vector<std::vector<Eigen::Vector3d>> trajs;
    trajs.reserve(library.size());
    for (const auto& mp : library) trajs.push_back(sample_world(mp, rates_.library_samples));
    queue_.push(encode_library(trajs, cycle.result.chosen_index, cycle.result.operator_index,
                               last_pruned_));
  }

  void on_audit(const ClosedLoop& loop) override {
    if (server_.client_count() == 0) return;
    if (!due(next_state_, rates_.state_hz, loop.now())) return;
    StateTelemetry st;
    st.stamp = loop.now();
    st.vehicle = loop.vehicle();
    st.command = last_command_;
    st.pruned = last_pruned_;
    st.emergency = last_emergency_;
    st.clearance = last_clearance_;
    queue_.push(encode_state(st));
  }

  /// Full map sent to a newly connected client. Diffs are set operations,
  /// so overlap with queued diffs is harmless.
  std::string map_snapshot_message() const {
    std::lock_guard lock(mutex_);
    MapDiff full;
    full.add = tracker_.sent();
    return encode_map_diff(full, voxel_size_, tracker_.sent());
  }

 private:
  static bool due(double& next, double rate, double now) {
    if (now + 1e-9 < next) return false;
    next = std::max(next + 1.0 / rate, now);
    return true;
  }

  BoundedQueue<std::string>& queue_;
  const ProtocolServer& server_;
  TelemetryRates rates_;
  mutable std::mutex mutex_;
  MapDiffTracker tracker_;
  double voxel_size_ = 0.2;
  double next_state_ = 0.0;
  double next_map_ = 0.0;
  double next_library_ = 0.0;
  OperatorCommand last_command_;
  bool last_pruned_ = false;
  bool last_emergency_ = false;
  double last_clearance_ = 0.0;
};

}  // namespace

SessionResult run_session(const SessionConfig& config, std::ostream& log,
                          const std::atomic<bool>* stop,
                          const std::function<void(std::uint16_t)>& on_listening) {
  sim::Scenario scenario = load_scenario_with_overrides(config.scenario, config.overrides);

  ActionMailbox mailbox;
  std::unique_ptr<OperatorInput> input;
  if (config.mode == SessionMode::kScripted) {
    const auto trace = config.trace ? config.trace : scenario.trace;
    if (!trace) throw std::invalid_argument("scripted mode needs a trace (--trace or scenario 'trace')");
    input = std::make_unique<TraceInput>(TraceInput::load(*trace));
  } else {
    if (!config.listen) throw std::invalid_argument("live mode needs a listen address");
    input = std::make_unique<MailboxInput>(mailbox, scenario.operator_policy);
  }

  BoundedQueue<std::string> telemetry(config.telemetry.queue_capacity);
  std::unique_ptr<TelemetryPublisher> publisher;
  const std::string config_message = encode_config(scenario);
  ProtocolServer server(
      [&mailbox](const ActionMessage& m) { mailbox.post(m.command); },
      [&] {
        std::vector<std::string> greeting{config_message};
        if (publisher) greeting.push_back(publisher->map_snapshot_message());
        return greeting;
      });
  publisher = std::make_unique<TelemetryPublisher>(telemetry, server, config.telemetry);

  SessionResult result;
  if (config.listen) {
    const auto [host, port] = parse_listen_address(*config.listen);
    result.port = server.start(host, port);
    log << "listening on ws://" << host << ":" << result.port << "\n";
    if (on_listening) on_listening(result.port);
  }

  std::thread pump([&] {
    while (true) {
      auto msg = telemetry.pop_for(std::chrono::milliseconds(50));
      if (msg) {
        server.broadcast(std::move(*msg));
      } else if (telemetry.closed()) {
        break;
      }
    }
  });

  MetricsWriter metrics(config.metrics);
  ClosedLoop loop(scenario, *input);
  loop.set_observer(publisher.get());
  loop.set_metrics_sink([&metrics](const MetricsRecord& r) { metrics.push(r); });

  const auto wall_start = std::chrono::steady_clock::now();
  const auto end_ns = std::llround(scenario.duration * 1e9);
  try {
    while (std::llround(loop.next_event_time() * 1e9) < end_ns) {
      if (stop && stop->load()) break;
      if (config.realtime) {
        const auto due = wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(loop.next_event_time()));
        std::this_thread::sleep_until(due);
      }
      loop.step();
    }
  } catch (...) {
    telemetry.close();
    pump.join();
    metrics.close();
    server.stop();
    throw;
  }

  telemetry.close();
  pump.join();
  metrics.close();
  server.stop();

  result.summary = loop.summary();
  result.metrics_rows = metrics.rows_written();
  result.telemetry_dropped = telemetry.dropped();
  result.summary_path = summary_path_for(config.metrics);
  {
    std::ofstream out(result.summary_path);
    if (!out) throw std::runtime_error("cannot write " + result.summary_path.string());
    out << result.summary.to_json().dump(2) << "\n";
  }
  log << result.summary.to_text();
  return result;
}

}  // namespace teleop::session
