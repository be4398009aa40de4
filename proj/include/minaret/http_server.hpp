#pragma once

#include <string>

#include <httplib.h>

#include "minaret/engine.hpp"

namespace minaret {

/// JSON-over-HTTP front end. Request-scoped state only; the engine and its
/// stores are shared read-only. Every response body carries the trace, and
/// a request_id field (or X-Request-Id header) echoes back.
class HttpService {
public:
  explicit HttpService(const Engine& engine);

  /// Blocking; returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  void stop() { server_.stop(); }

  /// Exposed for tests (ephemeral-port binding).
  httplib::Server& server() { return server_; }

private:
  void register_routes();
  const Engine& engine_;
  httplib::Server server_;
};

}  // namespace minaret
