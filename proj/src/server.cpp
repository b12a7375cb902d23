#include "vinesense/server.hpp"

#include <deque>
#include <optional>
#include <thread>
#include <utility>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "format.hpp"

namespace vinesense {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket&& socket, Session& session, std::size_t queue_limit)
      : ws_(std::move(socket)), session_(session), limit_(queue_limit), client_(session.new_client()) {}

  ~Connection() {
    if (sub_) session_.unsubscribe(*sub_);
    session_.release(client_);
  }

  void run() {
    net::dispatch(ws_.get_executor(), beast::bind_front_handler(&Connection::on_run, shared_from_this()));
  }

 private:
  void on_run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(beast::bind_front_handler(&Connection::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    std::weak_ptr<Connection> weak = shared_from_this();
    sub_ = session_.subscribe([weak](const std::shared_ptr<const std::string>& line) {
      if (auto self = weak.lock()) self->send(line, true);
    });
    do_read();
  }

  void do_read() { ws_.async_read(buffer_, beast::bind_front_handler(&Connection::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      session_.release(client_);
      if (sub_) session_.unsubscribe(*sub_);
      sub_.reset();
      return;
    }
    const std::string msg = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::string reply;
    try {
      reply = session_.submit(client_, parse_command(msg));
    } catch (const CommandError& e) {
      reply = error_record(e.req(), e.code(), e.detail());
    }
    send(std::make_shared<const std::string>(std::move(reply)), false);
    do_read();
  }

  void send(const std::shared_ptr<const std::string>& msg, bool droppable) {
    net::post(ws_.get_executor(), [self = shared_from_this(), msg, droppable] { self->enqueue(msg, droppable); });
  }

  void enqueue(const std::shared_ptr<const std::string>& msg, bool droppable) {
    if (droppable && queue_.size() >= limit_) {
      // Drop the oldest snapshot, skipping the entry being written and any
      // command replies.
      auto it = queue_.begin() + (writing_ ? 1 : 0);
      while (it != queue_.end() && !it->second) ++it;
      if (it != queue_.end()) {
        queue_.erase(it);
        session_.report_dropped(1);
      }
    }
    queue_.emplace_back(msg, droppable);
    if (!writing_) do_write();
  }

  void do_write() {
    writing_ = true;
    ws_.async_write(net::buffer(*queue_.front().first), beast::bind_front_handler(&Connection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      writing_ = false;
      return;
    }
    queue_.pop_front();
    if (!queue_.empty())
      do_write();
    else
      writing_ = false;
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Session& session_;
  std::size_t limit_;
  ClientId client_;
  std::optional<std::uint64_t> sub_;
  std::deque<std::pair<std::shared_ptr<const std::string>, bool>> queue_;  // message, droppable
  bool writing_ = false;
};

}  // namespace

struct Server::Impl {
  Impl(Session& s, ServerOptions o) : session(s), options(std::move(o)), acceptor(ioc) {}

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto conn = std::make_shared<Connection>(std::move(socket), session, options.send_queue_limit);
      conn->run();
      do_accept();
    });
  }

  Session& session;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::thread thread;
  unsigned short bound_port = 0;
};

Server::Server(Session& session, ServerOptions options) : impl_(std::make_unique<Impl>(session, std::move(options))) {
  const tcp::endpoint ep(net::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->bound_port = impl_->acceptor.local_endpoint().port();
}

Server::~Server() { stop(); }

void Server::start() {
  impl_->do_accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

unsigned short Server::port() const { return impl_->bound_port; }

ServerOptions parse_bind(const std::string& bind) {
  ServerOptions o;
  const auto colon = bind.rfind(':');
  std::string host = colon == std::string::npos ? "0.0.0.0" : bind.substr(0, colon);
  const std::string port = colon == std::string::npos ? bind : bind.substr(colon + 1);
  if (host.empty() || host == "localhost") host = host.empty() ? "0.0.0.0" : "127.0.0.1";
  const auto p = detail::parse_int(port);
  if (!p || *p < 0 || *p > 65535) throw Error(ErrorCode::InvalidArgument, "bad bind address " + bind);
  o.address = host;
  o.port = static_cast<unsigned short>(*p);
  return o;
}

}  // namespace vinesense
