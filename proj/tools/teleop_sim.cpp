#include <atomic>
#include <csignal>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "teleop/session/session.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  using teleop::session::SessionConfig;
  using teleop::session::SessionMode;

  CLI::App app{"Closed-loop teleoperation simulator"};
  SessionConfig config;
  std::string scenario;
  std::string trace;
  std::string mode = "scripted";
  std::string listen;
  std::string metrics = "metrics.csv";
  std::string realtime = "off";

  app.add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--trace", trace, "Operator trace CSV (scripted mode)")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "live or scripted")->check(CLI::IsMember({"live", "scripted"}));
  app.add_option("--listen", listen, "WebSocket HOST:PORT (default 127.0.0.1:8765 in live mode)");
  app.add_option("--metrics", metrics, "Metrics CSV output path");
  app.add_option("--realtime", realtime, "Pace the clock to wall time")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--seed", config.overrides.seed, "Override the scenario seed");
  app.add_option("--r", config.overrides.collision_radius, "Collision radius r [m]");
  app.add_option("--r-v", config.overrides.vehicle_radius, "Vehicle radius r_v [m]");
  app.add_option("--T", config.overrides.duration_T, "Primitive duration T [s]");
  app.add_option("--v-max", config.overrides.v_max, "Maximum forward speed [m/s]");
  app.add_option("--voxel-size", config.overrides.voxel_size, "Map voxel size [m]");
  app.add_option("--duration", config.overrides.session_duration, "Session length [s]");

  CLI11_PARSE(app, argc, argv);

  config.scenario = scenario;
  config.mode = mode == "live" ? SessionMode::kLive : SessionMode::kScripted;
  if (!trace.empty()) config.trace = trace;
  if (!listen.empty()) {
    config.listen = listen;
  } else if (config.mode == SessionMode::kLive) {
    config.listen = "127.0.0.1:8765";
  }
  config.metrics = metrics;
  // Live sessions are paced to wall time unless explicitly disabled.
  config.realtime = realtime == "on" || (config.mode == SessionMode::kLive && !app.count("--realtime"));

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    const auto result = teleop::session::run_session(config, std::cout, &g_stop);
    std::cout << "metrics: " << config.metrics.string() << " (" << result.metrics_rows
              << " rows)\nsummary: " << result.summary_path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
