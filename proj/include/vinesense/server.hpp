#pragma once

// WebSocket front end for a Session: every connection receives the snapshot
// stream; text messages are parsed as command records and answered with an
// ack or error record on the same connection.

#include <cstdint>
#include <memory>
#include <string>

#include "vinesense/session.hpp"

namespace vinesense {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  std::size_t send_queue_limit = 1024;  // per connection; oldest snapshots are dropped beyond it
};

class Server {
 public:
  Server(Session& session, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void start();
  void stop();
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" -> options; a bare port binds 0.0.0.0.
ServerOptions parse_bind(const std::string& bind);

}  // namespace vinesense
