#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>

#include "json.hpp"
#include "teleop/session/operator_input.hpp"
#include "teleop/session/protocol_server.hpp"
#include "teleop/session/session.hpp"
#include "teleop/session/wire_protocol.hpp"

namespace teleop::session {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;
using mapping::VoxelKey;

TEST(WireProtocol, ParsesActionMessage) {
  const auto m = parse_client_message(
      R"({"type":"action","vx":2.5,"vz":-0.5,"omega":0.4,"rot":3.14,"stamp":12.5,"extra":[1]})");
  EXPECT_EQ(m.command.action.vx, 2.5);
  EXPECT_EQ(m.command.action.vz, -0.5);
  EXPECT_EQ(m.command.action.omega, 0.4);
  EXPECT_EQ(m.command.rotation, 3.14);
  EXPECT_EQ(m.stamp, 12.5);
  const auto d = parse_client_message(R"({"type":"action","vx":1,"vz":0,"omega":0})");
  EXPECT_EQ(d.command.rotation, 0.0);
  EXPECT_EQ(d.stamp, 0.0);
}

TEST(WireProtocol, RoundTrip) {
  ActionMessage m{{{1.25, -0.75, 0.3}, 1.5}, 42.0};
  const auto back = parse_client_message(encode_action(m));
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.stamp, m.stamp);
}

TEST(WireProtocol, RejectsMalformed) {
  for (const char* text :
       {"", "not json", "[1,2]", R"({"vx":1,"vz":0,"omega":0})", R"({"type":"state"})",
        R"({"type":7,"vx":1,"vz":0,"omega":0})", R"({"type":"action","vx":1,"vz":0})",
        R"({"type":"action","vx":"fast","vz":0,"omega":0})",
        R"({"type":"action","vx":1,"vz":0,"omega":0,"rot":null})"}) {
    EXPECT_THROW(parse_client_message(text), ProtocolError) << text;
  }
}

// Frozen from tests/oracles/voxel_checksum.py.
TEST(WireProtocol, ChecksumMatchesOracle) {
  std::vector<VoxelKey> keys{{1, 2, 3}, {-1, 0, 5}, {100000, -7, 2}};
  EXPECT_EQ(voxel_checksum(keys), 1388260447u);
  std::swap(keys[0], keys[2]);
  EXPECT_EQ(voxel_checksum(keys), 1388260447u);
  EXPECT_EQ(voxel_checksum({}), 0u);
}

TEST(WireProtocol, DiffStreamReproducesSet) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coord(-6, 6);
  MapDiffTracker tracker;
  std::set<VoxelKey> client;
  for (int step = 0; step < 100; ++step) {
    std::set<VoxelKey> current;
    const int n = step % 7 == 0 ? 0 : 40;
    for (int i = 0; i < n; ++i) current.insert({coord(rng), coord(rng), coord(rng)});
    const std::vector<VoxelKey> sorted(current.begin(), current.end());
    const MapDiff diff = tracker.update(sorted);
    for (const auto& k : diff.remove) EXPECT_EQ(client.erase(k), 1u);
    for (const auto& k : diff.add) EXPECT_TRUE(client.insert(k).second);
    EXPECT_EQ(client, current);
    EXPECT_EQ(tracker.sent(), sorted);
  }
}

TEST(WireProtocol, MapDiffMessageUsesVoxelCenters) {
  const std::vector<VoxelKey> full{{0, 0, 0}, {1, -1, 2}};
  MapDiff diff;
  diff.add = {full[1]};
  diff.remove = {{5, 5, 5}};
  const json msg = json::parse(encode_map_diff(diff, 0.2, full));
  EXPECT_EQ(msg["type"], "map_diff");
  ASSERT_EQ(msg["add"].size(), 1u);
  EXPECT_NEAR(msg["add"][0][0].get<double>(), 0.3, 1e-12);
  EXPECT_NEAR(msg["add"][0][1].get<double>(), -0.1, 1e-12);
  EXPECT_NEAR(msg["add"][0][2].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(msg["remove"][0][0].get<double>(), 1.1, 1e-12);
  EXPECT_EQ(msg["count"], 2);
  EXPECT_EQ(msg["checksum"], voxel_checksum(full));
}

TEST(WireProtocol, TelemetryEncoders) {
  const auto sc = sim::parse_scenario(json::object());
  const json config = json::parse(encode_config(sc));
  EXPECT_EQ(config["type"], "config");
  EXPECT_EQ(config["grid"]["vx"][2], 25);
  EXPECT_EQ(config["voxel_size"], 0.2);

  StateTelemetry st;
  st.stamp = 1.5;
  st.vehicle.velocity = {3.0, 4.0, 0.0};
  st.pruned = true;
  st.clearance = std::numeric_limits<double>::infinity();
  const json state = json::parse(encode_state(st));
  EXPECT_EQ(state["type"], "state");
  EXPECT_EQ(state["speed"], 5.0);
  EXPECT_TRUE(state["clearance"].is_null());
  EXPECT_TRUE(state["pruned"].get<bool>());

  const json lib = json::parse(encode_library({{{0, 0, 0}, {1, 0, 0}}, {{0, 0, 0}}}, 1, 0, true));
  EXPECT_EQ(lib["type"], "library");
  EXPECT_EQ(lib["trajs"].size(), 2u);
  EXPECT_EQ(lib["trajs"][0][1][0], 1.0);
  EXPECT_EQ(lib["chosen"], 1);
  EXPECT_TRUE(lib["pruned"].get<bool>());

  const json traj = json::parse(encode_trajectory({{1, 2, 3}}, {2.0, 0.0, 0.4}, false, true));
  EXPECT_EQ(traj["type"], "trajectory");
  EXPECT_EQ(traj["action"]["omega"], 0.4);
  EXPECT_TRUE(traj["emergency"].get<bool>());
}

TEST(ListenAddress, Parses) {
  EXPECT_EQ(parse_listen_address("127.0.0.1:8765"), std::make_pair(std::string("127.0.0.1"), std::uint16_t{8765}));
  EXPECT_EQ(parse_listen_address("localhost:0").second, 0);
  for (const char* bad : {"", "8765", "host:", ":80", "host:99999", "host:12x"}) {
    EXPECT_THROW(parse_listen_address(bad), std::invalid_argument) << bad;
  }
}

class Client {
 public:
  explicit Client(std::uint16_t port) : ws_(ioc_) {
    tcp::resolver resolver(ioc_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }

  json read() {
    beast::flat_buffer buffer;
    ws_.read(buffer);
    return json::parse(beast::buffers_to_string(buffer.data()));
  }

  /// Reads until a message of `type` arrives.
  json read_type(const std::string& type) {
    for (int i = 0; i < 10000; ++i) {
      json msg = read();
      if (msg["type"] == type) return msg;
    }
    throw std::runtime_error("no " + type + " message");
  }

  void send(const std::string& text, bool binary = false) {
    ws_.binary(binary);
    ws_.write(asio::buffer(text));
  }

  /// True once the server has closed the connection.
  bool closed_by_server() {
    try {
      for (int i = 0; i < 100; ++i) read();
    } catch (const beast::system_error& e) {
      return e.code() == websocket::error::closed;
    }
    return false;
  }

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

template <typename Pred>
bool wait_for(Pred pred, std::chrono::milliseconds limit = std::chrono::milliseconds(3000)) {
  const auto until = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < until) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return pred();
}

TEST(ProtocolServer, GreetsAcceptsActionsAndBroadcasts) {
  ActionMailbox mailbox;
  ProtocolServer server([&](const ActionMessage& m) { mailbox.post(m.command); },
                        [] { return std::vector<std::string>{R"({"type":"config"})", R"({"type":"map_diff","add":[],"remove":[]})"}; });
  const auto port = server.start("127.0.0.1", 0);
  ASSERT_NE(port, 0);

  Client a(port);
  EXPECT_EQ(a.read()["type"], "config");
  EXPECT_EQ(a.read()["type"], "map_diff");
  Client b(port);
  b.read();
  b.read();
  ASSERT_TRUE(wait_for([&] { return server.client_count() == 2; }));

  a.send(encode_action({{{2.0, 0.0, 0.5}, 0.0}, 1.0}));
  ASSERT_TRUE(wait_for([&] { return mailbox.read().sequence == 1; }));
  b.send(encode_action({{{1.0, 0.0, 0.0}, 0.0}, 1.1}));
  ASSERT_TRUE(wait_for([&] { return mailbox.read().sequence == 2; }));
  EXPECT_EQ(mailbox.read().command.action.vx, 1.0);

  server.broadcast(R"({"type":"state","t":1})");
  EXPECT_EQ(a.read()["t"], 1);
  EXPECT_EQ(b.read()["t"], 1);
  EXPECT_EQ(server.messages_received(), 2u);
  server.stop();
}

TEST(ProtocolServer, MalformedMessageClosesOnlyThatClient) {
  ActionMailbox mailbox;
  ProtocolServer server([&](const ActionMessage& m) { mailbox.post(m.command); },
                        [] { return std::vector<std::string>{R"({"type":"config"})"}; });
  const auto port = server.start("127.0.0.1", 0);
  Client bad(port), binary(port), good(port);
  bad.read();
  binary.read();
  good.read();
  bad.send("{\"type\":\"action\",\"vx\":");
  EXPECT_TRUE(bad.closed_by_server());
  binary.send(encode_action({}), /*binary=*/true);
  EXPECT_TRUE(binary.closed_by_server());
  ASSERT_TRUE(wait_for([&] { return server.client_count() == 1; }));
  EXPECT_EQ(server.protocol_errors(), 2u);
  EXPECT_EQ(mailbox.read().sequence, 0u);
  good.send(encode_action({{{3.0, 0.0, 0.0}, 0.0}, 0.0}));
  ASSERT_TRUE(wait_for([&] { return mailbox.read().sequence == 1; }));
  server.stop();
}

TEST(ProtocolServer, BindFailureThrows) {
  ProtocolServer first([](const ActionMessage&) {}, [] { return std::vector<std::string>{}; });
  const auto port = first.start("127.0.0.1", 0);
  ProtocolServer second([](const ActionMessage&) {}, [] { return std::vector<std::string>{}; });
  EXPECT_THROW(second.start("127.0.0.1", port), std::runtime_error);
  first.stop();
}

TEST(LiveSession, ClientDrivesVehicleAndSeesConsistentMap) {
  SessionConfig config;
  config.scenario = std::filesystem::path(TELEOP_SCENARIO_DIR) / "dead_end_indoor.json";
  config.mode = SessionMode::kLive;
  config.listen = "127.0.0.1:0";
  config.realtime = true;
  config.overrides.session_duration = 2.0;
  config.metrics = std::filesystem::temp_directory_path() / "teleop_live_test.csv";

  std::atomic<std::uint16_t> port{0};
  std::ostringstream log;
  SessionResult result;
  std::thread session([&] {
    result = run_session(config, log, nullptr, [&](std::uint16_t p) { port = p; });
  });
  ASSERT_TRUE(wait_for([&] { return port.load() != 0; }));

  std::map<std::string, int> seen;
  std::set<VoxelKey> voxels;
  bool checksum_ok = true;
  int diffs = 0;
  try {
    Client client(port);
    const json config_msg = client.read();
    EXPECT_EQ(config_msg["type"], "config");
    EXPECT_EQ(config_msg["scenario"], "dead_end_indoor");
    client.send(encode_action({{{2.0, 0.0, 0.0}, 0.0}, 0.0}));
    const double voxel = config_msg["voxel_size"];
    auto key = [voxel](const json& p) {
      return VoxelKey{static_cast<std::int32_t>(std::floor(p[0].get<double>() / voxel)),
                      static_cast<std::int32_t>(std::floor(p[1].get<double>() / voxel)),
                      static_cast<std::int32_t>(std::floor(p[2].get<double>() / voxel))};
    };
    while (true) {
      const json msg = client.read();
      const std::string type = msg["type"];
      ++seen[type];
      if (type == "state" && seen[type] % 5 == 0) {
        client.send(encode_action({{{2.0, 0.0, 0.0}, 0.0}, msg["t"].get<double>()}));
      }
      if (type == "map_diff") {
        for (const auto& p : msg["remove"]) voxels.erase(key(p));
        for (const auto& p : msg["add"]) voxels.insert(key(p));
        const std::vector<VoxelKey> held(voxels.begin(), voxels.end());
        checksum_ok = checksum_ok && held.size() == msg["count"].get<std::size_t>() &&
                      voxel_checksum(held) == msg["checksum"].get<std::uint32_t>();
        ++diffs;
      }
    }
  } catch (const std::exception&) {
    // Server closed the connection at the end of the session.
  }
  session.join();

  EXPECT_GT(seen["state"], 20);
  EXPECT_GT(seen["trajectory"], 10);
  EXPECT_GT(seen["library"], 2);
  EXPECT_GT(diffs, 2);
  EXPECT_TRUE(checksum_ok);
  EXPECT_GT(result.summary.max_speed, 1.0);
  EXPECT_EQ(result.metrics_rows, 50u);
  std::filesystem::remove(config.metrics);
  std::filesystem::remove(result.summary_path);
}

TEST(LiveSession, NoClientHoldsZeroAction) {
  SessionConfig config;
  config.scenario = std::filesystem::path(TELEOP_SCENARIO_DIR) / "wall_stop_indoor.json";
  config.mode = SessionMode::kLive;
  config.listen = "127.0.0.1:0";
  config.overrides.session_duration = 1.0;
  config.metrics = std::filesystem::temp_directory_path() / "teleop_live_idle.csv";
  std::ostringstream log;
  const auto result = run_session(config, log);
  EXPECT_EQ(result.summary.max_speed, 0.0);
  EXPECT_EQ(result.metrics_rows, 25u);
  std::filesystem::remove(config.metrics);
  std::filesystem::remove(result.summary_path);
}

}  // namespace
}  // namespace teleop::session
