#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "teleop/mapping/voxel_grid.hpp"
#include "teleop/session/operator_input.hpp"
#include "teleop/sim/scenario.hpp"

namespace teleop::session {

/// Malformed or unexpected client message; the connection that sent it is closed.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Client -> server: {"type":"action","vx":f,"vz":f,"omega":f,"rot":f,"stamp":f}.
/// rot and stamp default to 0. Unknown extra fields are ignored.
struct ActionMessage {
  OperatorCommand command;
  double stamp = 0.0;
};

ActionMessage parse_client_message(std::string_view text);
std::string encode_action(const ActionMessage& message);

/// Order-independent checksum of a voxel set: the 32-bit wrapping sum of
/// (x * 73856093) ^ (y * 19349663) ^ (z * 83492791) over all keys, each
/// product taken modulo 2^32.
std::uint32_t voxel_checksum(std::span<const mapping::VoxelKey> keys);

struct MapDiff {
  std::vector<mapping::VoxelKey> add;
  std::vector<mapping::VoxelKey> remove;
};

/// Tracks the voxel set last sent to clients.
class MapDiffTracker {
 public:
  /// Diff from the last sent set to `current` (sorted, unique); `current`
  /// becomes the sent set.
  MapDiff update(std::vector<mapping::VoxelKey> current);
  const std::vector<mapping::VoxelKey>& sent() const { return sent_; }
  void reset() { sent_.clear(); }

 private:
  std::vector<mapping::VoxelKey> sent_;
};

struct StateTelemetry {
  double stamp = 0.0;
  sim::VehicleState vehicle;
  OperatorCommand command;
  bool pruned = false;
  bool emergency = false;
  double clearance = 0.0;
};

std::string encode_config(const sim::Scenario& scenario);
std::string encode_state(const StateTelemetry& state);
std::string encode_map_diff(const MapDiff& diff, double voxel_size,
                            std::span<const mapping::VoxelKey> full_set);
std::string encode_library(const std::vector<std::vector<Eigen::Vector3d>>& trajectories,
                           std::size_t chosen, std::size_t operator_index, bool pruned);
std::string encode_trajectory(const std::vector<Eigen::Vector3d>& points,
                              const trajectory::Action& action, bool pruned, bool emergency);

}  // namespace teleop::session
