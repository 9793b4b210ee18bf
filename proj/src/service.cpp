#include "dronecine/service.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "dronecine/errors.hpp"

namespace dronecine::service {

namespace {

constexpr std::size_t kLogCapacity = 8192;
constexpr std::uint64_t kMaxAdvanceTicks = 200000;

template <typename T>
T& find_or_throw(std::vector<T>& items, int id, const char* what) {
  const auto it = std::find_if(items.begin(), items.end(), [id](const T& x) { return x.id == id; });
  if (it == items.end()) throw NotFound(std::string(what) + " " + std::to_string(id) + " does not exist", "id");
  return *it;
}

template <typename T>
void erase_or_throw(std::vector<T>& items, int id, const char* what) {
  const auto it = std::find_if(items.begin(), items.end(), [id](const T& x) { return x.id == id; });
  if (it == items.end()) throw NotFound(std::string(what) + " " + std::to_string(id) + " does not exist", "id");
  items.erase(it);
}

Json require_object(const Json& body) {
  if (!body.is_object()) throw ParseError("request body must be a JSON object", "");
  return body;
}

// Applies a merge patch to the JSON form of an item; ids are immutable.
template <typename T, typename ToJson, typename FromJson>
T patched(const T& item, const Json& patch, ToJson to, FromJson from) {
  Json j = to(item);
  j.merge_patch(require_object(patch));
  if (j.contains("id") && j["id"] != item.id) throw InvalidArgument("id cannot be changed", "id");
  return from(j, "");
}

Json with_id(Json body, int id) {
  body = require_object(body);
  if (body.contains("id")) throw InvalidArgument("ids are assigned by the server", "id");
  body["id"] = id;
  return body;
}

double field_number(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0.0;
  if (!it->is_number()) throw ParseError(std::string(key) + " must be a number", key);
  return it->get<double>();
}

}  // namespace

std::string_view to_string(RunState state) {
  switch (state) {
    case RunState::editing: return "editing";
    case RunState::running: return "running";
    case RunState::paused: return "paused";
    case RunState::freeplay: return "freeplay";
  }
  return "editing";
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::state: return "state";
    case MessageKind::control: return "control";
    case MessageKind::event: return "event";
    case MessageKind::error: return "error";
  }
  return "error";
}

scan::QualityMode parse_quality_mode(std::string_view name) {
  if (name == "landscape") return scan::QualityMode::landscape;
  if (name == "detail") return scan::QualityMode::detail;
  throw InvalidArgument("mode must be landscape or detail", "mode");
}

Json StreamMessage::to_json() const {
  return {{"kind", to_string(kind)}, {"seq", seq}, {"tick", tick}, {"payload", payload}};
}

// ---------------------------------------------------------------------------

Session::Session(std::string id, project::Project project)
    : id_(std::move(id)), project_(std::move(project)) {
  project::validate(project_);
}

RunState Session::run_state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

std::uint64_t Session::tick() const {
  std::lock_guard lock(mutex_);
  return world_ ? world_->tick : 0;
}

Json Session::summary() const {
  std::lock_guard lock(mutex_);
  Json j = {{"id", id_},
            {"run_state", to_string(state_)},
            {"tick", world_ ? world_->tick : 0},
            {"next_seq", next_seq_}};
  j["freeplay_drone_id"] = freeplay_drone_ ? Json(*freeplay_drone_) : Json();
  return j;
}

project::Project Session::project() const {
  std::lock_guard lock(mutex_);
  return project_;
}

Json Session::project_json() const {
  std::lock_guard lock(mutex_);
  return io::to_json(project_);
}

void Session::require_state(RunState expected, const char* action) const {
  if (state_ != expected)
    throw ConflictError(std::string("cannot ") + action + " while " + std::string(to_string(state_)),
                        "run_state");
}

template <typename F>
void Session::mutate(F&& f) {
  std::lock_guard lock(mutex_);
  require_state(RunState::editing, "edit the project");
  project::Project copy = project_;
  f(copy);
  project::validate(copy);
  project_ = std::move(copy);
}

void Session::replace_project(std::string_view document) {
  project::Project loaded = io::load_project(document);
  mutate([&](project::Project& p) { p = std::move(loaded); });
}

std::string Session::save() const {
  std::lock_guard lock(mutex_);
  return io::save_project(project_);
}

int Session::add_actor(const Json& body) {
  int id = 0;
  mutate([&](project::Project& p) {
    id = project::next_id(p.actors);
    p.actors.push_back(io::actor_from_json(with_id(body, id), ""));
  });
  return id;
}

void Session::update_actor(int id, const Json& patch) {
  mutate([&](project::Project& p) {
    auto& actor = find_or_throw(p.actors, id, "actor");
    actor = patched(actor, patch, [](const auto& a) { return io::to_json(a); }, io::actor_from_json);
  });
}

void Session::delete_actor(int id) {
  mutate([&](project::Project& p) { erase_or_throw(p.actors, id, "actor"); });
}

int Session::add_drone(const Json& body) {
  int id = 0;
  mutate([&](project::Project& p) {
    id = project::next_id(p.drones);
    p.drones.push_back(io::drone_from_json(with_id(body, id), ""));
  });
  return id;
}

void Session::update_drone(int id, const Json& patch) {
  mutate([&](project::Project& p) {
    auto& drone = find_or_throw(p.drones, id, "drone");
    drone = patched(drone, patch, [](const auto& d) { return io::to_json(d); }, io::drone_from_json);
  });
}

void Session::delete_drone(int id) {
  mutate([&](project::Project& p) { erase_or_throw(p.drones, id, "drone"); });
}

void Session::update_waypoints(int recording_id, const Json& waypoints) {
  mutate([&](project::Project& p) {
    auto& rec = find_or_throw(p.recordings, recording_id, "recording");
    Json j = io::to_json(rec.plan);
    j["waypoints"] = waypoints;
    rec.plan = io::flight_plan_from_json(j, "");
  });
}

void Session::update_scene(const Json& patch) {
  mutate([&](project::Project& p) {
    Json j = io::to_json(p.scene);
    j.merge_patch(require_object(patch));
    p.scene = io::scene_from_json(j, "scene");
  });
}

void Session::update_wind(const Json& patch) {
  mutate([&](project::Project& p) {
    Json j = io::to_json(p.wind);
    j.merge_patch(require_object(patch));
    p.wind = io::wind_from_json(j, "wind");
  });
}

Json Session::generate_scan_plan(const Json& body) {
  const Json b = require_object(body);
  Json out;
  mutate([&](project::Project& p) {
    project::ScanPlanEntry entry;
    entry.id = project::next_id(p.scan_plans);
    for (const auto& item : b.items())
      if (item.key() != "area" && item.key() != "config")
        throw VersionError("unknown field " + item.key(), item.key());
    if (b.contains("area")) entry.area = io::area_from_json(b["area"], "area");
    if (b.contains("config")) entry.config = io::scan_config_from_json(b["config"], "config");
    entry.plan = scan::plan_scan(entry.area, entry.config);
    out = {{"id", entry.id},
           {"total_image_count", entry.plan->total_image_count},
           {"plan", io::to_json(*entry.plan)}};
    p.scan_plans.push_back(std::move(entry));
  });
  return out;
}

Json Session::verify_overlap(int scan_plan_id, scan::QualityMode mode) const {
  std::lock_guard lock(mutex_);
  const project::ScanPlanEntry* entry = project::find_scan_plan(project_, scan_plan_id);
  if (!entry) throw NotFound("scan plan " + std::to_string(scan_plan_id) + " does not exist", "id");
  const scan::ScanPlan plan = entry->plan ? *entry->plan : scan::plan_scan(entry->area, entry->config);
  Json report = io::to_json(scan::verify_overlap(plan, entry->config.camera, mode));
  report["id"] = scan_plan_id;
  return report;
}

namespace {

project::ShotEntry shot_entry_from_body(const Json& b, int id) {
  project::ShotEntry entry;
  entry.id = id;
  for (const auto& item : b.items())
    if (item.key() != "spec" && item.key() != "dt_s" && item.key() != "drone_id")
      throw VersionError("unknown field " + item.key(), item.key());
  if (b.contains("spec")) entry.spec = io::shot_spec_from_json(b["spec"], "spec");
  if (b.contains("dt_s")) {
    if (!b["dt_s"].is_number()) throw ParseError("dt_s must be a number", "dt_s");
    entry.dt = b["dt_s"].get<double>();
  }
  return entry;
}

Json shot_response(const project::ShotEntry& entry) {
  return {{"id", entry.id},
          {"duration_s", entry.trajectory->duration()},
          {"trajectory", io::to_json(*entry.trajectory)}};
}

}  // namespace

Json Session::generate_shot(const Json& body) {
  const Json b = require_object(body);
  Json out;
  mutate([&](project::Project& p) {
    project::ShotEntry entry = shot_entry_from_body(b, project::next_id(p.shots));
    project::validate(p);
    entry.trajectory = project::generate_for_project(p, entry);
    if (b.contains("drone_id")) {
      if (!b["drone_id"].is_number_integer()) throw ParseError("drone_id must be an integer", "drone_id");
      auto& drone = find_or_throw(p.drones, b["drone_id"].get<int>(), "drone");
      drone.assignment = project::Assignment::shot;
      drone.assignment_id = entry.id;
    }
    out = shot_response(entry);
    p.shots.push_back(std::move(entry));
  });
  return out;
}

Json Session::update_shot(int id, const Json& patch) {
  Json out;
  mutate([&](project::Project& p) {
    auto& entry = find_or_throw(p.shots, id, "shot");
    Json j = {{"spec", io::to_json(entry.spec)}, {"dt_s", entry.dt}};
    j.merge_patch(require_object(patch));
    project::ShotEntry updated = shot_entry_from_body(j, id);
    updated.trajectory = project::generate_for_project(p, updated);
    entry = std::move(updated);
    out = shot_response(entry);
  });
  return out;
}

void Session::delete_shot(int id) {
  mutate([&](project::Project& p) { erase_or_throw(p.shots, id, "shot"); });
}

// ---------------------------------------------------------------------------

void Session::publish_locked(MessageKind kind, Json payload) {
  log_.push_back({kind, next_seq_++, world_ ? world_->tick : 0, std::move(payload)});
  while (log_.size() > kLogCapacity) log_.pop_front();
  cv_.notify_all();
}

Json Session::snapshot_locked() const {
  Json drones = Json::array();
  Json actors = Json::array();
  if (world_) {
    for (const auto& d : world_->drones) {
      drones.push_back({{"id", d.id},
                        {"position", io::to_json(d.state.position)},
                        {"velocity", io::to_json(d.state.velocity)},
                        {"yaw_deg", d.state.yaw},
                        {"gimbal_pitch_deg", d.state.gimbal_pitch},
                        {"manual", std::holds_alternative<sim::Manual>(d.mode)},
                        {"camera", io::to_json(d.camera)}});
    }
    for (const auto& a : world_->actors) {
      actors.push_back({{"id", a.id},
                        {"kind", sim::to_string(a.kind)},
                        {"position", io::to_json(a.pose.position)},
                        {"yaw_deg", a.pose.yaw}});
    }
  } else {
    for (const auto& d : project_.drones) {
      drones.push_back({{"id", d.id},
                        {"position", io::to_json(d.position)},
                        {"velocity", io::to_json(geometry::EnuPoint{})},
                        {"yaw_deg", d.yaw},
                        {"gimbal_pitch_deg", d.gimbal_pitch},
                        {"manual", d.assignment == project::Assignment::manual},
                        {"camera", io::to_json(d.camera)}});
    }
    for (const auto& a : project_.actors) {
      actors.push_back({{"id", a.id},
                        {"kind", sim::to_string(a.kind)},
                        {"position", io::to_json(a.path.empty() ? geometry::EnuPoint{} : a.path.front())},
                        {"yaw_deg", 0.0}});
    }
  }
  return {{"run_state", to_string(state_)},
          {"tick", world_ ? world_->tick : 0},
          {"time_s", world_ ? world_->time() : 0.0},
          {"drones", std::move(drones)},
          {"actors", std::move(actors)}};
}

Json Session::state_snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_locked();
}

void Session::start() {
  std::lock_guard lock(mutex_);
  if (state_ == RunState::editing) {
    world_ = project::build_world(project_, {std::nullopt, true});
  } else if (state_ != RunState::paused) {
    throw ConflictError("cannot start while " + std::string(to_string(state_)), "run_state");
  }
  state_ = RunState::running;
  publish_locked(MessageKind::state, snapshot_locked());
}

void Session::pause() {
  std::lock_guard lock(mutex_);
  require_state(RunState::running, "pause");
  state_ = RunState::paused;
}

void Session::reset() {
  std::lock_guard lock(mutex_);
  if (state_ != RunState::running && state_ != RunState::paused)
    throw ConflictError("cannot reset while " + std::string(to_string(state_)), "run_state");
  state_ = RunState::editing;
  world_.reset();
  pending_controls_.clear();
}

void Session::step_locked() {
  sim::World& world = *world_;
  for (const auto& [drone, input] : pending_controls_) world.controls[drone] = input;
  pending_controls_.clear();
  const auto events = sim::advance(world, world.config.tick);
  publish_locked(MessageKind::state, snapshot_locked());
  for (const auto& e : events) publish_locked(MessageKind::event, io::to_json(e));
}

Json Session::advance(std::uint64_t ticks) {
  std::lock_guard lock(mutex_);
  if (state_ != RunState::running && state_ != RunState::freeplay)
    throw ConflictError("cannot advance while " + std::string(to_string(state_)), "run_state");
  if (ticks == 0 || ticks > kMaxAdvanceTicks)
    throw InvalidArgument("ticks must lie in [1, " + std::to_string(kMaxAdvanceTicks) + "]", "ticks");
  const std::uint64_t first_seq = next_seq_;
  for (std::uint64_t i = 0; i < ticks; ++i) step_locked();
  Json events = Json::array();
  for (const auto& m : log_)
    if (m.seq >= first_seq && m.kind == MessageKind::event) events.push_back(m.payload);
  return {{"tick", world_->tick}, {"time_s", world_->time()}, {"events", std::move(events)}};
}

bool Session::tick_if_active() {
  std::lock_guard lock(mutex_);
  if (state_ != RunState::running && state_ != RunState::freeplay) return false;
  step_locked();
  return true;
}

void Session::enter_freeplay(int drone_id) {
  std::lock_guard lock(mutex_);
  require_state(RunState::editing, "enter freeplay");
  if (!project::find_drone(project_, drone_id))
    throw NotFound("drone " + std::to_string(drone_id) + " does not exist", "drone_id");
  world_ = project::build_world(project_, {drone_id, false});
  freeplay_drone_ = drone_id;
  state_ = RunState::freeplay;
  publish_locked(MessageKind::state, snapshot_locked());
}

std::optional<int> Session::exit_freeplay() {
  std::lock_guard lock(mutex_);
  require_state(RunState::freeplay, "exit freeplay");
  const int drone_id = *freeplay_drone_;
  const sim::Recording& rec = world_->recordings.at(drone_id);
  std::optional<int> recording_id;
  if (rec.samples.size() >= 2) {
    project::Project copy = project_;
    project::RecordingEntry entry;
    entry.id = project::next_id(copy.recordings);
    entry.drone_id = drone_id;
    entry.plan = sim::record_and_export(rec, copy.origin, 1.0);
    copy.recordings.push_back(std::move(entry));
    project::validate(copy);
    recording_id = copy.recordings.back().id;
    project_ = std::move(copy);
  }
  state_ = RunState::editing;
  world_.reset();
  freeplay_drone_.reset();
  pending_controls_.clear();
  return recording_id;
}

void Session::handle_stream_message(std::string_view text) {
  std::lock_guard lock(mutex_);
  auto reject = [&](const Error& e) {
    publish_locked(MessageKind::error, {{"kind", to_string(e.kind())},
                                        {"field", e.field()},
                                        {"reason", e.what()}});
  };
  Json msg;
  sim::ControlInput input;
  int drone_id = 0;
  try {
    msg = io::parse_json(text);
    if (!msg.is_object()) throw ParseError("stream message must be an object", "");
    if (msg.value("kind", "") != "control")
      throw InvalidArgument("only control messages are accepted", "kind");
  } catch (const Error& e) {
    reject(e);
    throw;
  }
  if (state_ != RunState::freeplay)
    throw ConflictError("control messages are accepted only in freeplay", "run_state");
  try {
    for (const auto& item : msg.items())
      if (item.key() != "kind" && item.key() != "payload" && item.key() != "seq" && item.key() != "tick")
        throw ParseError("unknown field " + item.key(), item.key());
    const Json payload = msg.value("payload", Json::object());
    if (!payload.is_object()) throw ParseError("payload must be an object", "payload");
    static const std::set<std::string> allowed = {"drone_id", "forward", "right", "climb",
                                                  "yaw_rate", "gimbal_rate"};
    for (const auto& item : payload.items())
      if (!allowed.count(item.key()))
        throw ParseError("unknown control field " + item.key(), "payload." + item.key());
    drone_id = *freeplay_drone_;
    if (payload.contains("drone_id")) {
      if (!payload["drone_id"].is_number_integer() || payload["drone_id"].get<int>() != drone_id)
        throw InvalidArgument("controls may only target the freeplay drone", "payload.drone_id");
    }
    input = sim::clamp({field_number(payload, "forward"), field_number(payload, "right"),
                        field_number(payload, "climb"), field_number(payload, "yaw_rate"),
                        field_number(payload, "gimbal_rate")});
  } catch (const Error& e) {
    reject(e);
    throw;
  }
  pending_controls_[drone_id] = input;
  publish_locked(MessageKind::control, {{"drone_id", drone_id},
                                        {"forward", input.forward},
                                        {"right", input.right},
                                        {"climb", input.climb},
                                        {"yaw_rate", input.yaw_rate},
                                        {"gimbal_rate", input.gimbal_rate},
                                        {"applies_at_tick", world_->tick + 1}});
}

double Session::coverage(int drone_id, const geometry::EnuPoint& landmark) const {
  std::lock_guard lock(mutex_);
  if (!world_) throw ConflictError("no simulation has been run", "run_state");
  const auto it = world_->recordings.find(drone_id);
  if (it == world_->recordings.end())
    throw NotFound("no recording for drone " + std::to_string(drone_id), "drone_id");
  const sim::Drone* drone = nullptr;
  for (const auto& d : world_->drones)
    if (d.id == drone_id) drone = &d;
  return sim::landmark_coverage(it->second, drone->camera, landmark);
}

ExportResult Session::export_plan(const std::string& source, int id, const std::string& format) const {
  std::lock_guard lock(mutex_);
  if (format == "manifest") {
    if (source != "scan_plan") throw InvalidArgument("manifest export needs a scan plan", "source");
    const auto* entry = project::find_scan_plan(project_, id);
    if (!entry) throw NotFound("scan plan " + std::to_string(id) + " does not exist", "id");
    const scan::ScanPlan plan = entry->plan ? *entry->plan : scan::plan_scan(entry->area, entry->config);
    return {io::export_capture_manifest(plan, project_.origin), "text/csv"};
  }

  flightplan::FlightPlan plan;
  if (source == "shot") {
    const auto* entry = project::find_shot(project_, id);
    if (!entry) throw NotFound("shot " + std::to_string(id) + " does not exist", "id");
    const shot::Trajectory t = entry->trajectory ? *entry->trajectory
                                                 : project::generate_for_project(project_, *entry);
    plan = flightplan::trajectory_to_flight_plan(t, project_.origin, 1.0);
  } else if (source == "scan_plan") {
    const auto* entry = project::find_scan_plan(project_, id);
    if (!entry) throw NotFound("scan plan " + std::to_string(id) + " does not exist", "id");
    const scan::ScanPlan sp = entry->plan ? *entry->plan : scan::plan_scan(entry->area, entry->config);
    plan = flightplan::scan_plan_to_flight_plan(sp, project_.origin, entry->config.cruise_speed);
  } else if (source == "recording") {
    const auto* entry = project::find_recording(project_, id);
    if (!entry) throw NotFound("recording " + std::to_string(id) + " does not exist", "id");
    plan = entry->plan;
  } else {
    throw InvalidArgument("source must be shot, scan_plan or recording", "source");
  }

  if (format == "qgc") return {io::export_qgc_plan(plan), "application/json"};
  if (format == "litchi") return {io::export_litchi_csv(plan), "text/csv"};
  if (format == "json") return {io::save_flight_plan_document(plan), "application/json"};
  throw InvalidArgument("format must be qgc, litchi, json or manifest", "format");
}

std::vector<StreamMessage> Session::messages_since(std::uint64_t from, std::size_t max, int wait_ms) {
  std::unique_lock lock(mutex_);
  if (wait_ms > 0)
    cv_.wait_for(lock, std::chrono::milliseconds(wait_ms), [&] { return closed_ || next_seq_ > from; });
  std::vector<StreamMessage> out;
  for (const auto& m : log_) {
    if (out.size() >= max) break;
    if (m.seq >= from) out.push_back(m);
  }
  return out;
}

std::uint64_t Session::next_seq() const {
  std::lock_guard lock(mutex_);
  return next_seq_;
}

void Session::close(const std::string& reason) {
  std::lock_guard lock(mutex_);
  if (closed_) return;
  publish_locked(MessageKind::error, {{"kind", "closed"}, {"field", ""}, {"reason", reason}});
  closed_ = true;
  close_reason_ = reason;
  cv_.notify_all();
}

bool Session::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

// ---------------------------------------------------------------------------

std::shared_ptr<Session> SessionStore::create(project::Project project) {
  std::lock_guard lock(mutex_);
  const std::string id = "s" + std::to_string(++counter_);
  auto session = std::make_shared<Session>(id, std::move(project));
  sessions_[id] = session;
  return session;
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("session " + id + " does not exist", "session_id");
  return it->second;
}

void SessionStore::remove(const std::string& id) {
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("session " + id + " does not exist", "session_id");
    session = it->second;
    sessions_.erase(it);
  }
  session->close("session deleted");
}

std::vector<std::shared_ptr<Session>> SessionStore::all() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<Session>> out;
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

}  // namespace dronecine::service
