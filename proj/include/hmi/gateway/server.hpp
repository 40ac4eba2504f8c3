#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <string>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "hmi/gateway/session.hpp"

namespace hmi::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

// Websocket transport for one Session at a time. Everything runs on the
// io_context thread: frames are read, queued into the session and ticked in
// order, so the session never sees concurrent access. The tick loop starts
// after session{start} and is paced to wall-clock time. A second connection
// while one is active gets an error frame and is closed.
class Server {
 public:
  using SessionFactory = std::function<std::unique_ptr<Session>()>;

  Server(net::io_context& io, const tcp::endpoint& endpoint, SessionFactory factory)
      : acceptor_(io, endpoint), factory_(std::move(factory)) {}

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() { accept(); }

  void stop() {
    beast::error_code ec;
    acceptor_.close(ec);
    if (auto c = active_.lock()) c->close();
  }

  bool busy() const { return !active_.expired(); }

 private:
  class Connection : public std::enable_shared_from_this<Connection> {
   public:
    Connection(tcp::socket socket, Server& server)
        : ws_(std::move(socket)), timer_(ws_.get_executor()), server_(server) {}

    void run(bool refuse) {
      refuse_ = refuse;
      ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

    void close() {
      timer_.cancel();
      if (closing_) return;
      closing_ = true;
      ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {});
    }

   private:
    void on_accept(beast::error_code ec) {
      if (ec) return;
      ws_.text(true);
      if (refuse_) {
        send(error_message("another operator is already connected"));
        closing_after_write_ = true;
        return;
      }
      session_ = server_.factory_();
      read();
    }

    void read() {
      ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
      if (ec) {
        timer_.cancel();
        session_->abort();
        return;
      }
      const std::string frame = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      const bool was_running = session_->running();
      for (auto& reply : session_->receive(frame)) send(std::move(reply));
      if (!was_running && session_->running()) start_ticks();
      read();
    }

    void start_ticks() {
      period_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(session_->tick_period()));
      next_ = std::chrono::steady_clock::now() + period_;
      arm();
    }

    void arm() {
      timer_.expires_at(next_);
      timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_tick(ec); });
    }

    void on_tick(beast::error_code ec) {
      if (ec || closing_) return;
      for (auto& frame : session_->advance()) send(std::move(frame));
      if (!session_->running()) return;
      next_ += period_;
      // fell far behind (debugger, suspend): resynchronise instead of bursting
      if (std::chrono::steady_clock::now() - next_ > 10 * period_) next_ = std::chrono::steady_clock::now();
      arm();
    }

    void send(std::string frame) {
      outbox_.push_back(std::move(frame));
      if (outbox_.size() == 1) write();
    }

    void write() {
      ws_.async_write(net::buffer(outbox_.front()),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
    }

    void on_write(beast::error_code ec) {
      if (ec) return;
      outbox_.pop_front();
      if (!outbox_.empty()) {
        write();
      } else if (closing_after_write_) {
        closing_after_write_ = false;
        close();
      }
    }

    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    Server& server_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    std::unique_ptr<Session> session_;
    std::chrono::steady_clock::duration period_{};
    std::chrono::steady_clock::time_point next_{};
    bool refuse_ = false;
    bool closing_ = false;
    bool closing_after_write_ = false;
  };

  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto c = std::make_shared<Connection>(std::move(socket), *this);
      const bool refuse = busy();
      if (!refuse) active_ = c;
      c->run(refuse);
      accept();
    });
  }

  tcp::acceptor acceptor_;
  SessionFactory factory_;
  std::weak_ptr<Connection> active_;
};

}  // namespace hmi::gateway
