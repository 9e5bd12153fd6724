#include "teleop/session/protocol_server.hpp"

#include <deque>
#include <set>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace teleop::session {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

class Connection;

}  // namespace

struct ProtocolServer::Impl {
  ProtocolServer& owner;
  ActionHandler on_action;
  Greeting greeting;
  std::size_t client_queue;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::set<std::shared_ptr<Connection>> connections;  // touched on the I/O thread only
  std::thread thread;
  bool running = false;

  Impl(ProtocolServer& o, ActionHandler a, Greeting g, std::size_t q)
      : owner(o), on_action(std::move(a)), greeting(std::move(g)), client_queue(q) {}

  void accept();
  void attach(const std::shared_ptr<Connection>& c);
  void detach(const std::shared_ptr<Connection>& c);
  void owner_received() { ++owner.received_; }
  void owner_error() { ++owner.protocol_errors_; }
};

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, ProtocolServer::Impl& server)
      : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.attach(self);
      if (self->server_.greeting) {
        for (auto& m : self->server_.greeting()) self->send(std::make_shared<const std::string>(std::move(m)));
      }
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> message) {
    if (closing_) return;
    if (outbox_.size() >= server_.client_queue) {
      // The front frame may be mid-write; drop the oldest one behind it.
      auto victim = writing_ ? std::next(outbox_.begin()) : outbox_.begin();
      if (victim != outbox_.end()) outbox_.erase(victim);
    }
    outbox_.push_back(std::move(message));
    if (!writing_) write_next();
  }

  void close(websocket::close_code code) {
    if (closing_) return;
    closing_ = true;
    ws_.async_close(code, [self = shared_from_this()](beast::error_code) {
      self->server_.detach(self);
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      server_.detach(shared_from_this());
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    try {
      if (!ws_.got_text()) throw ProtocolError("binary frames are not accepted");
      const ActionMessage msg = parse_client_message(text);
      server_.owner_received();
      if (server_.on_action) server_.on_action(msg);
    } catch (const ProtocolError&) {
      server_.owner_error();
      close(websocket::close_code::policy_error);
      return;
    }
    read();
  }

  void write_next() {
    if (outbox_.empty() || closing_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    auto message = outbox_.front();
    ws_.async_write(net::buffer(*message),
                    [self = shared_from_this(), message](beast::error_code ec, std::size_t) {
                      if (!self->outbox_.empty()) self->outbox_.pop_front();
                      if (ec) {
                        self->writing_ = false;
                        self->server_.detach(self);
                        return;
                      }
                      self->write_next();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  ProtocolServer::Impl& server_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  bool writing_ = false;
  bool closing_ = false;
};

}  // namespace

void ProtocolServer::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Connection>(std::move(socket), *this)->start();
    accept();
  });
}

void ProtocolServer::Impl::attach(const std::shared_ptr<Connection>& c) {
  if (connections.insert(c).second) ++owner.clients_;
}

void ProtocolServer::Impl::detach(const std::shared_ptr<Connection>& c) {
  if (connections.erase(c) > 0) --owner.clients_;
}

ProtocolServer::ProtocolServer(ActionHandler on_action, Greeting greeting, std::size_t client_queue)
    : impl_(std::make_unique<Impl>(*this, std::move(on_action), std::move(greeting),
                                   client_queue == 0 ? 1 : client_queue)) {}

ProtocolServer::~ProtocolServer() { stop(); }

std::uint16_t ProtocolServer::start(const std::string& host, std::uint16_t port) {
  if (impl_->running) throw std::logic_error("protocol server already running");
  beast::error_code ec;
  const auto address = net::ip::make_address(host, ec);
  if (ec) throw std::runtime_error("invalid listen address '" + host + "'");
  const tcp::endpoint endpoint(address, port);
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    acc.close();
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " +
                             ec.message());
  }
  const auto bound = acc.local_endpoint().port();
  impl_->running = true;
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
  return bound;
}

void ProtocolServer::stop() {
  if (!impl_ || !impl_->running) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    for (const auto& c : std::vector(impl_->connections.begin(), impl_->connections.end())) {
      c->close(websocket::close_code::going_away);
    }
  });
  // Give clients a moment to complete the close handshake.
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->connections.clear();
  clients_ = 0;
  impl_->running = false;
}

void ProtocolServer::broadcast(std::string message) {
  if (!impl_->running) return;
  auto shared = std::make_shared<const std::string>(std::move(message));
  net::post(impl_->ioc, [this, shared] {
    for (const auto& c : impl_->connections) c->send(shared);
  });
}

std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw std::invalid_argument("expected HOST:PORT, got '" + text + "'");
  }
  const std::string port_text = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long port = 0;
  try {
    port = std::stoul(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port > 65535) {
    throw std::invalid_argument("invalid port in '" + text + "'");
  }
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace teleop::session
