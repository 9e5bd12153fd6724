#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "teleop/session/metrics.hpp"
#include "teleop/sim/scenario.hpp"

namespace teleop::session {

/// Command-line overrides applied on top of a scenario file.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> collision_radius;
  std::optional<double> vehicle_radius;
  std::optional<double> duration_T;
  std::optional<double> v_max;
  std::optional<double> voxel_size;
  std::optional<double> session_duration;
};

/// Loads a scenario and applies overrides. The seed is applied before
/// parsing so randomly placed obstacles follow it.
sim::Scenario load_scenario_with_overrides(const std::filesystem::path& path,
                                           const ScenarioOverrides& overrides);

enum class SessionMode { kScripted, kLive };

struct TelemetryRates {
  double state_hz = 30.0;
  double map_hz = 5.0;
  double library_hz = 5.0;
  int library_samples = 10;      // points per primitive in library messages
  int trajectory_samples = 20;   // points in the chosen-trajectory message
  std::size_t queue_capacity = 256;
};

struct SessionConfig {
  std::filesystem::path scenario;
  ScenarioOverrides overrides;
  SessionMode mode = SessionMode::kScripted;
  std::optional<std::filesystem::path> trace;  // scripted mode; falls back to the scenario's
  std::optional<std::string> listen;           // HOST:PORT; required in live mode
  std::filesystem::path metrics = "metrics.csv";
  bool realtime = false;
  TelemetryRates telemetry;
};

struct SessionResult {
  SessionSummary summary;
  std::size_t metrics_rows = 0;
  std::uint16_t port = 0;
  std::size_t telemetry_dropped = 0;
  std::filesystem::path summary_path;
};

/// Summary file written beside the metrics CSV.
std::filesystem::path summary_path_for(const std::filesystem::path& metrics);

/// Runs one session to completion or until `*stop` becomes true.
/// `on_listening` receives the bound port once the server is up.
SessionResult run_session(const SessionConfig& config, std::ostream& log,
                          const std::atomic<bool>* stop = nullptr,
                          const std::function<void(std::uint16_t)>& on_listening = {});

}  // namespace teleop::session
