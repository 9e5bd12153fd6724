#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "teleop/mapping/local_map.hpp"
#include "teleop/planner/action_grid.hpp"
#include "teleop/planner/teleop_planner.hpp"
#include "teleop/sim/depth_sensor.hpp"
#include "teleop/sim/vehicle.hpp"
#include "teleop/sim/world.hpp"

namespace teleop::sim {

struct Rates {
  double plan = 25.0;   // Hz
  double map = 30.0;    // Hz
  double audit = 100.0; // Hz, ground-truth clearance sampling
};

struct OperatorPolicy {
  double timeout = 0.5;           // seconds without input before the fallback applies
  bool renew_on_timeout = false;  // keep the last action instead of stopping
};

/// Everything needed to run one closed-loop session.
struct Scenario {
  std::string name = "unnamed";
  double duration = 20.0;
  std::uint64_t seed = 0;
  World world;
  std::vector<DepthSensor> sensors = default_sensor_rig();
  VehicleState start;
  planner::ActionGridSpec grid;
  double rotation = 0.0;
  planner::PlannerParams planner;
  mapping::MapParams map;
  Rates rates;
  TrackingParams tracking;
  OperatorPolicy operator_policy;
  std::optional<std::filesystem::path> trace;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

/// Parses the scenario JSON schema documented in the README. Relative trace
/// paths resolve against `base_dir`. Throws std::invalid_argument with the
/// offending field on malformed input.
Scenario parse_scenario(const nlohmann::json& doc,
                        const std::filesystem::path& base_dir = {});

/// Throws std::runtime_error if the file cannot be read or parsed.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace teleop::sim
