#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "teleop/session/wire_protocol.hpp"

namespace teleop::session {

/// WebSocket endpoint for cockpit clients. Runs its own I/O thread.
///
/// Text frames from clients are parsed as action messages and handed to the
/// action callback; any malformed frame closes that connection. Outgoing
/// frames are queued per client with drop-oldest so a slow client never
/// stalls the others or the caller of broadcast().
class ProtocolServer {
 public:
  using ActionHandler = std::function<void(const ActionMessage&)>;
  /// Messages sent to each client right after the handshake.
  using Greeting = std::function<std::vector<std::string>()>;

  ProtocolServer(ActionHandler on_action, Greeting greeting, std::size_t client_queue = 64);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  /// Binds and starts serving. Port 0 picks a free port; returns the bound
  /// port. Throws std::runtime_error on bind failure.
  std::uint16_t start(const std::string& host, std::uint16_t port);
  void stop();

  /// Thread-safe; returns immediately.
  void broadcast(std::string message);

  std::size_t client_count() const { return clients_.load(); }
  std::size_t protocol_errors() const { return protocol_errors_.load(); }
  std::size_t messages_received() const { return received_.load(); }

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
  std::atomic<std::size_t> clients_{0};
  std::atomic<std::size_t> protocol_errors_{0};
  std::atomic<std::size_t> received_{0};
};

/// Splits "host:port"; throws std::invalid_argument on malformed input.
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& text);

}  // namespace teleop::session
