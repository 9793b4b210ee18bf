#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dronecine/flightplan_io.hpp"
#include "dronecine/project.hpp"
#include "dronecine/sim_engine.hpp"

namespace dronecine::service {

using io::Json;

enum class RunState { editing, running, paused, freeplay };
std::string_view to_string(RunState state);

enum class MessageKind { state, control, event, error };
std::string_view to_string(MessageKind kind);

struct StreamMessage {
  MessageKind kind = MessageKind::state;
  std::uint64_t seq = 0;
  std::uint64_t tick = 0;
  Json payload;

  Json to_json() const;
};

struct ExportResult {
  std::string body;
  std::string content_type;
};

// One editing/simulation session. Every public member locks the session, so
// commands and ticks are totally ordered.
class Session {
 public:
  Session(std::string id, project::Project project);

  const std::string& id() const { return id_; }
  RunState run_state() const;
  std::uint64_t tick() const;
  Json summary() const;

  // Project -----------------------------------------------------------------
  project::Project project() const;
  Json project_json() const;
  void replace_project(std::string_view document);
  std::string save() const;

  // Edits: only in editing; validated on a copy and committed atomically.
  int add_actor(const Json& body);
  void update_actor(int id, const Json& patch);
  void delete_actor(int id);
  int add_drone(const Json& body);
  void update_drone(int id, const Json& patch);
  void delete_drone(int id);
  void update_waypoints(int recording_id, const Json& waypoints);
  void update_scene(const Json& patch);
  void update_wind(const Json& patch);

  Json generate_scan_plan(const Json& body);
  Json verify_overlap(int scan_plan_id, scan::QualityMode mode) const;
  Json generate_shot(const Json& body);
  Json update_shot(int id, const Json& patch);
  void delete_shot(int id);

  // Simulation ---------------------------------------------------------------
  void start();
  void pause();
  void reset();
  /// Steps the world `ticks` times; only while running or in freeplay.
  Json advance(std::uint64_t ticks);
  /// One tick if running or in freeplay; no-op otherwise. Used by the ticker.
  bool tick_if_active();
  Json state_snapshot() const;

  void enter_freeplay(int drone_id);
  /// Leaves freeplay and attaches the recorded path (1 s waypoints) to the
  /// project. Returns the new recording id, or nullopt if too short to export.
  std::optional<int> exit_freeplay();

  /// Handles one inbound stream message. Controls are buffered and applied on
  /// the next tick, last writer wins. Throws ConflictError outside freeplay;
  /// malformed messages throw ParseError/InvalidArgument and are also echoed
  /// to the stream as error messages.
  void handle_stream_message(std::string_view text);

  double coverage(int drone_id, const geometry::EnuPoint& landmark) const;
  ExportResult export_plan(const std::string& source, int id, const std::string& format) const;

  // Outbound stream ----------------------------------------------------------
  /// Messages with seq >= from, at most `max`. Blocks up to `wait_ms` when
  /// none are available yet. Returns nothing once the session is closed.
  std::vector<StreamMessage> messages_since(std::uint64_t from, std::size_t max, int wait_ms);
  std::uint64_t next_seq() const;
  void close(const std::string& reason);
  bool closed() const;

 private:
  template <typename F>
  void mutate(F&& f);
  void require_state(RunState expected, const char* action) const;
  void step_locked();
  void publish_locked(MessageKind kind, Json payload);
  Json snapshot_locked() const;

  std::string id_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  project::Project project_;
  RunState state_ = RunState::editing;
  std::optional<sim::World> world_;
  std::optional<int> freeplay_drone_;
  std::map<int, sim::ControlInput> pending_controls_;
  std::deque<StreamMessage> log_;
  std::uint64_t next_seq_ = 0;
  bool closed_ = false;
  std::string close_reason_;
};

class SessionStore {
 public:
  std::shared_ptr<Session> create(project::Project project = {});
  std::shared_ptr<Session> get(const std::string& id) const;
  void remove(const std::string& id);
  std::vector<std::shared_ptr<Session>> all() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

scan::QualityMode parse_quality_mode(std::string_view name);

}  // namespace dronecine::service
