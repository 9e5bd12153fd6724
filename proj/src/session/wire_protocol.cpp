#include "teleop/session/wire_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "json.hpp"

namespace teleop::session {

namespace {

using nlohmann::json;

double rounded(double v) { return std::round(v * 1000.0) / 1000.0; }

json point_json(const Eigen::Vector3d& p) {
  return json::array({rounded(p.x()), rounded(p.y()), rounded(p.z())});
}

json points_json(const std::vector<Eigen::Vector3d>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back(point_json(p));
  return out;
}

json keys_json(std::span<const mapping::VoxelKey> keys, double voxel_size) {
  json out = json::array();
  for (const auto& k : keys) out.push_back(point_json(mapping::voxel_center(k, voxel_size)));
  return out;
}

json action_json(const trajectory::Action& a) {
  return {{"vx", a.vx}, {"vz", a.vz}, {"omega", a.omega}};
}

json axis_json(const planner::AxisSpec& a) { return json::array({a.min, a.max, a.count}); }

double required_number(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) {
    throw ProtocolError(std::string("action message needs numeric '") + key + "'");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ProtocolError(std::string("non-finite '") + key + "'");
  return v;
}

double optional_number(const json& doc, const char* key) {
  return doc.contains(key) ? required_number(doc, key) : 0.0;
}

}  // namespace

ActionMessage parse_client_message(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) throw ProtocolError("message is not a JSON object");
  const auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) throw ProtocolError("message has no type");
  if (*type != "action") throw ProtocolError("unknown message type " + type->get<std::string>());
  ActionMessage msg;
  msg.command.action.vx = required_number(doc, "vx");
  msg.command.action.vz = required_number(doc, "vz");
  msg.command.action.omega = required_number(doc, "omega");
  msg.command.rotation = optional_number(doc, "rot");
  msg.stamp = optional_number(doc, "stamp");
  return msg;
}

std::string encode_action(const ActionMessage& m) {
  return json{{"type", "action"},
              {"vx", m.command.action.vx},
              {"vz", m.command.action.vz},
              {"omega", m.command.action.omega},
              {"rot", m.command.rotation},
              {"stamp", m.stamp}}
      .dump();
}

std::uint32_t voxel_checksum(std::span<const mapping::VoxelKey> keys) {
  std::uint32_t sum = 0;
  for (const auto& k : keys) {
    const std::uint32_t h = (static_cast<std::uint32_t>(k.x) * 73856093u) ^
                            (static_cast<std::uint32_t>(k.y) * 19349663u) ^
                            (static_cast<std::uint32_t>(k.z) * 83492791u);
    sum += h;
  }
  return sum;
}

MapDiff MapDiffTracker::update(std::vector<mapping::VoxelKey> current) {
  MapDiff diff;
  std::set_difference(current.begin(), current.end(), sent_.begin(), sent_.end(),
                      std::back_inserter(diff.add));
  std::set_difference(sent_.begin(), sent_.end(), current.begin(), current.end(),
                      std::back_inserter(diff.remove));
  sent_ = std::move(current);
  return diff;
}

std::string encode_config(const sim::Scenario& sc) {
  return json{{"type", "config"},
              {"scenario", sc.name},
              {"voxel_size", sc.map.voxel_size},
              {"grid",
               {{"vx", axis_json(sc.grid.vx)},
                {"omega", axis_json(sc.grid.omega)},
                {"vz", axis_json(sc.grid.vz)},
                {"rotation", sc.rotation}}},
              {"planner",
               {{"duration", sc.planner.duration},
                {"collision_radius", sc.planner.collision_radius},
                {"vehicle_radius", sc.planner.vehicle_radius}}},
              {"rates", {{"plan", sc.rates.plan}, {"map", sc.rates.map}}},
              {"start", point_json(sc.start.position)}}
      .dump();
}

std::string encode_state(const StateTelemetry& s) {
  json clearance = std::isfinite(s.clearance) ? json(rounded(s.clearance)) : json(nullptr);
  return json{{"type", "state"},
              {"t", s.stamp},
              {"pos", point_json(s.vehicle.position)},
              {"vel", point_json(s.vehicle.velocity)},
              {"acc", point_json(s.vehicle.acceleration)},
              {"yaw", s.vehicle.yaw},
              {"yaw_rate", s.vehicle.yaw_rate},
              {"speed", s.vehicle.velocity.norm()},
              {"accel", s.vehicle.acceleration.norm()},
              {"clearance", clearance},
              {"operator", action_json(s.command.action)},
              {"rot", s.command.rotation},
              {"pruned", s.pruned},
              {"emergency", s.emergency}}
      .dump();
}

std::string encode_map_diff(const MapDiff& diff, double voxel_size,
                            std::span<const mapping::VoxelKey> full_set) {
  return json{{"type", "map_diff"},
              {"add", keys_json(diff.add, voxel_size)},
              {"remove", keys_json(diff.remove, voxel_size)},
              {"count", full_set.size()},
              {"checksum", voxel_checksum(full_set)}}
      .dump();
}

std::string encode_library(const std::vector<std::vector<Eigen::Vector3d>>& trajectories,
                           std::size_t chosen, std::size_t operator_index, bool pruned) {
  json trajs = json::array();
  for (const auto& t : trajectories) trajs.push_back(points_json(t));
  return json{{"type", "library"},
              {"trajs", std::move(trajs)},
              {"chosen", chosen},
              {"operator", operator_index},
              {"pruned", pruned}}
      .dump();
}

std::string encode_trajectory(const std::vector<Eigen::Vector3d>& points,
                              const trajectory::Action& action, bool pruned, bool emergency) {
  return json{{"type", "trajectory"},
              {"points", points_json(points)},
              {"action", action_json(action)},
              {"pruned", pruned},
              {"emergency", emergency}}
      .dump();
}

}  // namespace teleop::session
