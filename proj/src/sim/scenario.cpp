#include "teleop/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace teleop::sim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("scenario field '" + field + "': " + what);
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N) fail(field, "expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) fail(field, "expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

double number(const json& obj, const std::string& key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

planner::AxisSpec axis(const json& obj, const std::string& key, planner::AxisSpec fallback,
                       const std::string& path) {
  if (!obj.contains(key)) return fallback;
  const json& a = obj[key];
  if (!a.is_array() || a.size() != 3) fail(path + "." + key, "expected [min, max, count]");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<int>()};
}

Obstacle parse_obstacle(const json& o, const std::string& path) {
  const std::string type = o.value("type", "");
  Obstacle obstacle;
  if (type == "cylinder") {
    Cylinder c;
    c.center = vec<2>(o.at("center"), path + ".center");
    c.radius = o.at("radius").get<double>();
    const auto z = vec<2>(o.at("z"), path + ".z");
    c.z_min = z[0];
    c.z_max = z[1];
    obstacle.shape = c;
  } else if (type == "box") {
    obstacle.shape = Box{vec<3>(o.at("min"), path + ".min"), vec<3>(o.at("max"), path + ".max")};
  } else if (type == "wall") {
    obstacle.shape = Wall{vec<2>(o.at("from"), path + ".from"), vec<2>(o.at("to"), path + ".to")};
  } else {
    fail(path + ".type", "unknown obstacle type '" + type + "'");
  }
  if (o.contains("active")) {
    const auto window = vec<2>(o["active"], path + ".active");
    obstacle.active_from = window[0];
    obstacle.active_until = window[1];
  }
  return obstacle;
}

// Pillars scattered uniformly with a minimum spacing, avoiding keep-clear discs.
void add_random_pillars(World& world, const json& spec, std::uint64_t seed) {
  const std::string path = "world.random_pillars";
  const int count = spec.at("count").get<int>();
  const auto lo = vec<2>(spec.at("min"), path + ".min");
  const auto hi = vec<2>(spec.at("max"), path + ".max");
  const auto radius = vec<2>(spec.value("radius", json::array({0.3, 0.3})), path + ".radius");
  const auto z = vec<2>(spec.value("z", json::array({0.0, 10.0})), path + ".z");
  const double spacing = spec.value("min_spacing", 2.0);
  std::vector<std::pair<Eigen::Vector2d, double>> keep_clear;
  for (const auto& k : spec.value("keep_clear", json::array())) {
    keep_clear.emplace_back(vec<2>(k.at("center"), path + ".keep_clear"), k.at("radius").get<double>());
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x());
  std::uniform_real_distribution<double> uy(lo.y(), hi.y());
  std::uniform_real_distribution<double> ur(radius[0], radius[1]);
  std::vector<Eigen::Vector2d> placed;
  int attempts = 0;
  while (static_cast<int>(placed.size()) < count && attempts++ < 1000 * count) {
    const Eigen::Vector2d c(ux(rng), uy(rng));
    const double r = ur(rng);
    bool ok = true;
    for (const auto& p : placed) ok = ok && (p - c).norm() >= spacing;
    for (const auto& [center, clear] : keep_clear) ok = ok && (center - c).norm() >= clear + r;
    if (!ok) continue;
    placed.push_back(c);
    world.add(Cylinder{c, r, z[0], z[1]});
  }
}

DepthSensor parse_sensor(const json& s, const std::string& path) {
  DepthSensor sensor;
  const double deg = std::numbers::pi / 180.0;
  sensor.id = s.value("id", sensor.id);
  if (s.contains("position")) sensor.mount.translation = vec<3>(s["position"], path + ".position");
  if (s.contains("rpy_deg")) {
    const auto rpy = vec<3>(s["rpy_deg"], path + ".rpy_deg") * deg;
    sensor.mount.rotation = Eigen::AngleAxisd(rpy[2], Eigen::Vector3d::UnitZ()) *
                            Eigen::AngleAxisd(rpy[1], Eigen::Vector3d::UnitY()) *
                            Eigen::AngleAxisd(rpy[0], Eigen::Vector3d::UnitX());
  }
  sensor.h_fov = number(s, "h_fov_deg", sensor.h_fov / deg, path) * deg;
  sensor.v_fov = number(s, "v_fov_deg", sensor.v_fov / deg, path) * deg;
  sensor.max_range = number(s, "max_range", sensor.max_range, path);
  sensor.cols = s.value("cols", sensor.cols);
  sensor.rows = s.value("rows", sensor.rows);
  sensor.rate = number(s, "rate", sensor.rate, path);
  return sensor;
}

}  // namespace

void Scenario::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("scenario duration must be positive");
  if (!(rates.plan > 0.0 && rates.map > 0.0 && rates.audit > 0.0)) {
    throw std::invalid_argument("scenario rates must be positive");
  }
  if (sensors.empty()) throw std::invalid_argument("scenario needs at least one sensor");
  for (const auto& s : sensors) s.validate();
  if (!(planner.duration > 0.0)) throw std::invalid_argument("primitive duration must be positive");
  if (!(planner.check_dt > 0.0)) throw std::invalid_argument("collision check step must be positive");
  if (!(planner.collision_radius >= 0.0 && planner.vehicle_radius >= 0.0)) {
    throw std::invalid_argument("radii must be non-negative");
  }
  if (!(map.voxel_size > 0.0)) throw std::invalid_argument("voxel size must be positive");
  planner::ActionGrid grid_check(grid);
  (void)grid_check;
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  Scenario sc;
  try {
    sc.name = doc.value("name", sc.name);
    sc.duration = number(doc, "duration", sc.duration, "");
    sc.seed = doc.value("seed", sc.seed);

    if (doc.contains("world")) {
      const json& w = doc["world"];
      if (w.contains("bounds")) {
        sc.world.bounds_min = vec<3>(w["bounds"].at("min"), "world.bounds.min");
        sc.world.bounds_max = vec<3>(w["bounds"].at("max"), "world.bounds.max");
      }
      int i = 0;
      for (const auto& o : w.value("obstacles", json::array())) {
        sc.world.add(parse_obstacle(o, "world.obstacles[" + std::to_string(i++) + "]"));
      }
      if (w.contains("random_pillars")) add_random_pillars(sc.world, w["random_pillars"], sc.seed);
    }

    if (doc.contains("sensors")) {
      sc.sensors.clear();
      int i = 0;
      for (const auto& s : doc["sensors"]) {
        sc.sensors.push_back(parse_sensor(s, "sensors[" + std::to_string(i++) + "]"));
      }
    }

    if (doc.contains("vehicle")) {
      const json& v = doc["vehicle"];
      if (v.contains("position")) sc.start.position = vec<3>(v["position"], "vehicle.position");
      sc.start.yaw = wrap_angle(number(v, "yaw", 0.0, "vehicle"));
    }

    if (doc.contains("planner")) {
      const json& p = doc["planner"];
      auto& pp = sc.planner;
      pp.duration = number(p, "duration", pp.duration, "planner");
      pp.collision_radius = number(p, "collision_radius", pp.collision_radius, "planner");
      pp.vehicle_radius = number(p, "vehicle_radius", pp.vehicle_radius, "planner");
      pp.check_dt = number(p, "check_dt", pp.check_dt, "planner");
      pp.adaptive_duration = p.value("adaptive_duration", pp.adaptive_duration);
      pp.duration_gain = number(p, "duration_gain", pp.duration_gain, "planner");
      pp.brake_acceleration = number(p, "brake_acceleration", pp.brake_acceleration, "planner");
      sc.grid.vx = axis(p, "vx", sc.grid.vx, "planner");
      sc.grid.omega = axis(p, "omega", sc.grid.omega, "planner");
      sc.grid.vz = axis(p, "vz", sc.grid.vz, "planner");
      sc.rotation = number(p, "rotation", sc.rotation, "planner");
    }

    if (doc.contains("map")) {
      const json& m = doc["map"];
      sc.map.voxel_size = number(m, "voxel_size", sc.map.voxel_size, "map");
      sc.map.keyframe_distance = number(m, "keyframe_distance", sc.map.keyframe_distance, "map");
      sc.map.subframe_distance = number(m, "subframe_distance", sc.map.subframe_distance, "map");
      sc.map.subframe_heading = number(m, "subframe_heading", sc.map.subframe_heading, "map");
    }

    if (doc.contains("rates")) {
      const json& r = doc["rates"];
      sc.rates.plan = number(r, "plan", sc.rates.plan, "rates");
      sc.rates.map = number(r, "map", sc.rates.map, "rates");
      sc.rates.audit = number(r, "audit", sc.rates.audit, "rates");
    }

    if (doc.contains("tracking")) {
      const json& t = doc["tracking"];
      const std::string mode = t.value("mode", "perfect");
      if (mode == "perfect") {
        sc.tracking.mode = TrackingMode::kPerfect;
      } else if (mode == "lag") {
        sc.tracking.mode = TrackingMode::kFirstOrderLag;
      } else {
        fail("tracking.mode", "expected 'perfect' or 'lag'");
      }
      sc.tracking.lag_time_constant =
          number(t, "lag_time_constant", sc.tracking.lag_time_constant, "tracking");
    }

    if (doc.contains("operator")) {
      const json& o = doc["operator"];
      sc.operator_policy.timeout = number(o, "timeout", sc.operator_policy.timeout, "operator");
      const std::string on_timeout = o.value("on_timeout", "stop");
      if (on_timeout != "stop" && on_timeout != "renew") {
        fail("operator.on_timeout", "expected 'stop' or 'renew'");
      }
      sc.operator_policy.renew_on_timeout = on_timeout == "renew";
    }

    if (doc.contains("trace")) {
      std::filesystem::path trace = doc["trace"].get<std::string>();
      sc.trace = trace.is_relative() ? base_dir / trace : trace;
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("cannot parse scenario " + path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(doc, path.parent_path());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace teleop::sim
