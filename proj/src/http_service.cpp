#include "dronecine/http_service.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "dronecine/errors.hpp"

namespace dronecine::service {

namespace {

using httplib::Request;
using httplib::Response;

constexpr auto kTickPeriod = std::chrono::milliseconds(50);

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return 400;
    case ErrorKind::not_found: return 404;
    case ErrorKind::conflict: return 409;
    case ErrorKind::io:
    case ErrorKind::export_failure: return 500;
    default: return 422;
  }
}

Json error_body(const Error& e) {
  return {{"error", {{"kind", to_string(e.kind())}, {"field", e.field()}, {"reason", e.what()}}}};
}

void send_json(Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

void send_error(Response& res, const Error& e) { send_json(res, error_body(e), status_for(e.kind())); }

Json body_json(const Request& req) {
  if (req.body.empty()) return Json::object();
  return io::parse_json(req.body);
}

int path_int(const Request& req, std::size_t index, const char* field) {
  const std::string text = req.matches[index];
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("'" + text + "' is not an integer id", field);
  }
}

std::string query(const Request& req, const char* key, const std::string& fallback = {}) {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

double query_number(const Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("query parameter '" + std::string(key) + "' must be a number", key);
  }
}

std::uint64_t query_count(const Request& req, const char* key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const double v = query_number(req, key, static_cast<double>(fallback));
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw InvalidArgument("query parameter '" + std::string(key) + "' must be a non-negative integer", key);
  return static_cast<std::uint64_t>(v);
}

}  // namespace

struct HttpService::Impl {
  HttpOptions options;
  httplib::Server server;
  SessionStore store;
  std::atomic<bool> stopping{false};
  std::thread ticker;
  std::thread server_thread;
  std::thread shutdown_thread;

  using Handler = std::function<void(const Request&, Response&)>;

  Handler wrap(Handler f) {
    return [f = std::move(f)](const Request& req, Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const Json::exception& e) {
        send_error(res, ParseError(e.what()));
      } catch (const std::exception& e) {
        send_json(res, {{"error", {{"kind", "internal"}, {"field", ""}, {"reason", e.what()}}}}, 500);
      }
    };
  }

  std::shared_ptr<Session> session(const Request& req) { return store.get(req.matches[1]); }

  void routes();
  void stream_get(const Request& req, Response& res);
  void stream_post(const Request& req, Response& res);

  void run_ticker() {
    auto next = std::chrono::steady_clock::now();
    while (!stopping) {
      next += kTickPeriod;
      for (const auto& s : store.all()) s->tick_if_active();
      std::this_thread::sleep_until(next);
    }
  }
};

void HttpService::Impl::routes() {
  const std::string S = R"(/v1/sessions/([^/]+))";

  server.Get("/v1/health", wrap([](const Request&, Response& res) { send_json(res, {{"status", "ok"}}); }));

  server.Post("/v1/shutdown", wrap([this](const Request&, Response& res) {
    if (!options.allow_shutdown) throw NotFound("shutdown is disabled", "");
    send_json(res, {{"status", "stopping"}});
    if (!shutdown_thread.joinable()) {
      stopping = true;
      shutdown_thread = std::thread([this] { server.stop(); });
    }
  }));

  server.Get("/v1/sessions", wrap([this](const Request&, Response& res) {
    Json list = Json::array();
    for (const auto& s : store.all()) list.push_back(s->summary());
    send_json(res, {{"sessions", list}});
  }));

  server.Post("/v1/sessions", wrap([this](const Request& req, Response& res) {
    project::Project p;
    if (!req.body.empty()) p = io::load_project(req.body);
    const auto s = store.create(std::move(p));
    send_json(res, s->summary(), 201);
  }));

  server.Get(S, wrap([this](const Request& req, Response& res) { send_json(res, session(req)->summary()); }));

  server.Delete(S, wrap([this](const Request& req, Response& res) {
    store.remove(req.matches[1]);
    send_json(res, {{"deleted", std::string(req.matches[1])}});
  }));

  // Project persistence
  server.Get(S + "/project", wrap([this](const Request& req, Response& res) {
    send_json(res, session(req)->project_json());
  }));
  server.Put(S + "/project", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->replace_project(req.body);
    send_json(res, s->project_json());
  }));
  server.Post(S + "/save", wrap([this](const Request& req, Response& res) {
    res.set_content(session(req)->save(), "application/json");
  }));

  // Actors and drones
  server.Post(S + "/actors", wrap([this](const Request& req, Response& res) {
    send_json(res, {{"id", session(req)->add_actor(body_json(req))}}, 201);
  }));
  server.Patch(S + R"(/actors/(\d+))", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->update_actor(id, body_json(req));
    send_json(res, {{"id", id}});
  }));
  server.Delete(S + R"(/actors/(\d+))", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->delete_actor(id);
    send_json(res, {{"deleted", id}});
  }));
  server.Post(S + "/drones", wrap([this](const Request& req, Response& res) {
    send_json(res, {{"id", session(req)->add_drone(body_json(req))}}, 201);
  }));
  server.Patch(S + R"(/drones/(\d+))", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->update_drone(id, body_json(req));
    send_json(res, {{"id", id}});
  }));
  server.Delete(S + R"(/drones/(\d+))", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->delete_drone(id);
    send_json(res, {{"deleted", id}});
  }));
  server.Put(S + R"(/recordings/(\d+)/waypoints)", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->update_waypoints(id, body_json(req));
    send_json(res, {{"id", id}});
  }));
  server.Patch(S + "/scene", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->update_scene(body_json(req));
    send_json(res, s->project_json()["scene"]);
  }));
  server.Patch(S + "/wind", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->update_wind(body_json(req));
    send_json(res, s->project_json()["wind"]);
  }));

  // Planning
  server.Post(S + "/scan-plans", wrap([this](const Request& req, Response& res) {
    send_json(res, session(req)->generate_scan_plan(body_json(req)), 201);
  }));
  server.Post(S + R"(/scan-plans/(\d+)/verify)", wrap([this](const Request& req, Response& res) {
    const auto mode = parse_quality_mode(query(req, "mode", "landscape"));
    send_json(res, session(req)->verify_overlap(path_int(req, 2, "id"), mode));
  }));
  server.Post(S + "/shots", wrap([this](const Request& req, Response& res) {
    send_json(res, session(req)->generate_shot(body_json(req)), 201);
  }));
  server.Patch(S + R"(/shots/(\d+))", wrap([this](const Request& req, Response& res) {
    send_json(res, session(req)->update_shot(path_int(req, 2, "id"), body_json(req)));
  }));
  server.Delete(S + R"(/shots/(\d+))", wrap([this](const Request& req, Response& res) {
    const int id = path_int(req, 2, "id");
    session(req)->delete_shot(id);
    send_json(res, {{"deleted", id}});
  }));

  // Simulation
  server.Post(S + "/sim/start", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->start();
    send_json(res, s->summary());
  }));
  server.Post(S + "/sim/pause", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->pause();
    send_json(res, s->summary());
  }));
  server.Post(S + "/sim/reset", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    s->reset();
    send_json(res, s->summary());
  }));
  server.Post(S + "/sim/advance", wrap([this](const Request& req, Response& res) {
    const Json body = body_json(req);
    std::uint64_t ticks = 1;
    if (body.contains("ticks")) {
      if (!body["ticks"].is_number_unsigned()) throw ParseError("ticks must be a positive integer", "ticks");
      ticks = body["ticks"].get<std::uint64_t>();
    }
    send_json(res, session(req)->advance(ticks));
  }));
  server.Get(S + "/sim/state", wrap([this](const Request& req, Response& res) {
    send_json(res, session(req)->state_snapshot());
  }));
  server.Get(S + "/coverage", wrap([this](const Request& req, Response& res) {
    const int drone = static_cast<int>(query_count(req, "drone_id", 0));
    const geometry::EnuPoint landmark{query_number(req, "east_m", 0.0), query_number(req, "north_m", 0.0),
                                      query_number(req, "up_m", 0.0)};
    send_json(res, {{"drone_id", drone}, {"coverage", session(req)->coverage(drone, landmark)}});
  }));

  // Freeplay
  server.Post(S + "/freeplay", wrap([this](const Request& req, Response& res) {
    const Json body = body_json(req);
    if (!body.contains("drone_id") || !body["drone_id"].is_number_integer())
      throw InvalidArgument("drone_id is required", "drone_id");
    const auto s = session(req);
    s->enter_freeplay(body["drone_id"].get<int>());
    send_json(res, s->summary());
  }));
  server.Delete(S + "/freeplay", wrap([this](const Request& req, Response& res) {
    const auto s = session(req);
    const auto recording = s->exit_freeplay();
    Json out = s->summary();
    out["recording_id"] = recording ? Json(*recording) : Json();
    send_json(res, out);
  }));
  server.Post(S + "/stream", wrap([this](const Request& req, Response& res) { stream_post(req, res); }));
  server.Get(S + "/stream", wrap([this](const Request& req, Response& res) { stream_get(req, res); }));

  // Export
  server.Get(S + "/export", wrap([this](const Request& req, Response& res) {
    const auto out = session(req)->export_plan(query(req, "source"), static_cast<int>(query_count(req, "id", 0)),
                                               query(req, "format", "qgc"));
    res.set_content(out.body, out.content_type);
  }));
}

void HttpService::Impl::stream_post(const Request& req, Response& res) {
  const auto s = session(req);
  std::size_t accepted = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  const std::string& body = req.body;
  while (start <= body.size()) {
    std::size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    std::string line = body.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (end == body.size()) break;
      continue;
    }
    try {
      s->handle_stream_message(line);
      ++accepted;
    } catch (const Error& e) {
      Json out = error_body(e);
      out["accepted"] = accepted;
      out["line"] = line_no;
      send_json(res, out, status_for(e.kind()));
      return;
    }
    ++line_no;
  }
  send_json(res, {{"accepted", accepted}, {"next_seq", s->next_seq()}});
}

void HttpService::Impl::stream_get(const Request& req, Response& res) {
  const auto s = session(req);
  struct Cursor {
    std::uint64_t next;
    std::uint64_t remaining;
    bool follow;
  };
  auto cursor = std::make_shared<Cursor>(Cursor{query_count(req, "from", s->next_seq()),
                                                query_count(req, "max", UINT64_MAX),
                                                query(req, "follow", "1") != "0"});
  res.set_chunked_content_provider(
      "application/x-ndjson", [this, s, cursor](std::size_t, httplib::DataSink& sink) {
        if (cursor->remaining == 0 || stopping) {
          sink.done();
          return true;
        }
        const std::size_t batch = static_cast<std::size_t>(std::min<std::uint64_t>(cursor->remaining, 256));
        const auto messages = s->messages_since(cursor->next, batch, cursor->follow ? 200 : 0);
        std::string chunk;
        for (const auto& m : messages) {
          chunk += m.to_json().dump() + "\n";
          cursor->next = m.seq + 1;
          --cursor->remaining;
        }
        if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
        if (messages.empty() && (!cursor->follow || s->closed())) sink.done();
        return true;
      });
}

// ---------------------------------------------------------------------------

HttpService::HttpService(HttpOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  impl_->routes();
}

HttpService::~HttpService() {
  stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
  if (impl_->shutdown_thread.joinable()) impl_->shutdown_thread.join();
  if (impl_->ticker.joinable()) impl_->ticker.join();
}

int HttpService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw IoError("cannot bind " + host + ":" + std::to_string(port), "port");
  return bound;
}

void HttpService::run() {
  if (impl_->options.realtime_ticks && !impl_->ticker.joinable())
    impl_->ticker = std::thread([this] { impl_->run_ticker(); });
  impl_->server.listen_after_bind();
  impl_->stopping = true;
  for (const auto& s : impl_->store.all()) s->close("server stopped");
  if (impl_->ticker.joinable()) impl_->ticker.join();
}

void HttpService::start() {
  impl_->server_thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
}

void HttpService::stop() {
  impl_->stopping = true;
  for (const auto& s : impl_->store.all()) s->close("server stopped");
  impl_->server.stop();
}

SessionStore& HttpService::store() { return impl_->store; }

}  // namespace dronecine::service
