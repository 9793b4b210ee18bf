#pragma once

#include <memory>
#include <string>

#include "dronecine/service.hpp"

namespace dronecine::service {

struct HttpOptions {
  bool realtime_ticks = true;   // 20 Hz ticker thread for running sessions
  bool allow_shutdown = false;  // enables POST /v1/shutdown
};

// JSON over HTTP under /v1. The freeplay stream is split into two halves:
// POST /v1/sessions/{id}/stream takes NDJSON control messages and
// GET /v1/sessions/{id}/stream returns chunked NDJSON state/event/error
// messages.
class HttpService {
 public:
  explicit HttpService(HttpOptions options = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() or a shutdown request. Blocks.
  void run();
  /// Runs the server on a background thread and waits until it accepts.
  void start();
  void stop();

  SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dronecine::service
