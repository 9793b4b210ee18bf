#include "dronecine/project.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dronecine/errors.hpp"

namespace dronecine::project {

std::string_view to_string(Assignment a) {
  switch (a) {
    case Assignment::manual: return "manual";
    case Assignment::shot: return "shot";
    case Assignment::scan_plan: return "scan_plan";
    case Assignment::recording: return "recording";
  }
  return "manual";
}

Assignment parse_assignment(std::string_view name) {
  if (name == "manual") return Assignment::manual;
  if (name == "shot") return Assignment::shot;
  if (name == "scan_plan") return Assignment::scan_plan;
  if (name == "recording") return Assignment::recording;
  throw InvalidArgument("unknown drone assignment '" + std::string(name) + "'", "assignment");
}

namespace {

template <typename T>
const T* find_by_id(const std::vector<T>& items, int id) {
  const auto it = std::find_if(items.begin(), items.end(), [id](const T& x) { return x.id == id; });
  return it == items.end() ? nullptr : &*it;
}

template <typename T>
void check_unique_ids(const std::vector<T>& items, const std::string& list) {
  std::set<int> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id <= 0)
      throw InvalidArgument("ids must be positive integers",
                            list + "[" + std::to_string(i) + "].id");
    if (!seen.insert(items[i].id).second)
      throw IntegrityError("duplicate id " + std::to_string(items[i].id) + " in " + list,
                           list + "[" + std::to_string(i) + "].id");
  }
}

// Re-throws validation failures from nested objects with the list path prefixed.
template <typename F>
void with_prefix(const std::string& prefix, F&& f) {
  try {
    f();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), e.field().empty() ? prefix : prefix + "." + e.field());
  } catch (const ZeroLength& e) {
    throw InvalidArgument(e.what(), e.field().empty() ? prefix : prefix + "." + e.field());
  }
}

}  // namespace

const ActorConfig* find_actor(const Project& p, int id) { return find_by_id(p.actors, id); }
const DroneConfig* find_drone(const Project& p, int id) { return find_by_id(p.drones, id); }
const ShotEntry* find_shot(const Project& p, int id) { return find_by_id(p.shots, id); }
const ScanPlanEntry* find_scan_plan(const Project& p, int id) { return find_by_id(p.scan_plans, id); }
const RecordingEntry* find_recording(const Project& p, int id) { return find_by_id(p.recordings, id); }

sim::Actor build_actor(const ActorConfig& config, const sim::Terrain* terrain) {
  return sim::make_actor(config.id, config.kind, config.path, config.speed, config.loop, terrain);
}

void validate(const Project& project) {
  if (project.schema_version != kSchemaVersion)
    throw VersionError("unsupported schema_version " + std::to_string(project.schema_version) +
                           " (supported: " + std::to_string(kSchemaVersion) + ")",
                       "schema_version");
  geometry::validate(project.origin);
  const sim::Terrain* terrain = project.terrain.grid ? &*project.terrain.grid : nullptr;

  check_unique_ids(project.actors, "actors");
  check_unique_ids(project.drones, "drones");
  check_unique_ids(project.shots, "shots");
  check_unique_ids(project.scan_plans, "scan_plans");
  check_unique_ids(project.recordings, "recordings");

  for (std::size_t i = 0; i < project.actors.size(); ++i)
    with_prefix("actors[" + std::to_string(i) + "]",
                [&] { build_actor(project.actors[i], terrain); });

  for (std::size_t i = 0; i < project.drones.size(); ++i) {
    const DroneConfig& d = project.drones[i];
    const std::string field = "drones[" + std::to_string(i) + "]";
    with_prefix(field, [&] {
      sim::validate(d.limits);
      geometry::validate(geometry::Pose{d.position, d.yaw, d.gimbal_pitch});
    });
    if (d.assignment == Assignment::manual) continue;
    if (!d.assignment_id)
      throw InvalidArgument("drone assignment needs an id", field + ".assignment_id");
    const int ref = *d.assignment_id;
    const bool found = (d.assignment == Assignment::shot && find_shot(project, ref)) ||
                       (d.assignment == Assignment::scan_plan && find_scan_plan(project, ref)) ||
                       (d.assignment == Assignment::recording && find_recording(project, ref));
    if (!found)
      throw IntegrityError("drone " + std::to_string(d.id) + " references missing " +
                               std::string(to_string(d.assignment)) + " " + std::to_string(ref),
                           field + ".assignment_id");
  }

  for (std::size_t i = 0; i < project.shots.size(); ++i) {
    const ShotEntry& s = project.shots[i];
    const std::string field = "shots[" + std::to_string(i) + "]";
    with_prefix(field, [&] { shot::validate(s.spec); });
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw InvalidArgument("dt must be positive", field + ".dt_s");
    if (const auto* actor = std::get_if<shot::ActorId>(&s.spec.target);
        actor && !find_actor(project, actor->value))
      throw IntegrityError("shot " + std::to_string(s.id) + " targets missing actor " +
                               std::to_string(actor->value),
                           field + ".target.actor_id");
  }

  for (std::size_t i = 0; i < project.scan_plans.size(); ++i)
    with_prefix("scan_plans[" + std::to_string(i) + "]", [&] {
      scan::validate(project.scan_plans[i].area);
      scan::validate(project.scan_plans[i].config);
    });

  for (std::size_t i = 0; i < project.recordings.size(); ++i) {
    const RecordingEntry& r = project.recordings[i];
    const std::string field = "recordings[" + std::to_string(i) + "]";
    if (!find_drone(project, r.drone_id))
      throw IntegrityError("recording " + std::to_string(r.id) + " references missing drone " +
                               std::to_string(r.drone_id),
                           field + ".drone_id");
    with_prefix(field + ".plan", [&] { flightplan::validate(r.plan); });
  }

  const SceneMetadata& scene = project.scene;
  if (!(scene.time_of_day_h >= 0.0 && scene.time_of_day_h < 24.0))
    throw InvalidArgument("time of day must lie in [0, 24)", "scene.time_of_day_h");
  if (!(scene.lighting >= 0.0 && scene.lighting <= 1.0))
    throw InvalidArgument("lighting must lie in [0, 1]", "scene.lighting");
  if (!(scene.cloud_thickness >= 0.0 && scene.cloud_thickness <= 1.0))
    throw InvalidArgument("cloud thickness must lie in [0, 1]", "scene.cloud_thickness");
  if (!(scene.cloud_speed_mps >= 0.0) || !std::isfinite(scene.cloud_speed_mps))
    throw InvalidArgument("cloud speed must be non-negative", "scene.cloud_speed_mps");

  sim::validate(project.wind);
  sim::validate(project.sim);
}

shot::Trajectory generate_for_project(const Project& project, const ShotEntry& entry) {
  if (const auto* ref = std::get_if<shot::ActorId>(&entry.spec.target)) {
    const ActorConfig* config = find_actor(project, ref->value);
    if (!config)
      throw IntegrityError("shot " + std::to_string(entry.id) + " targets missing actor " +
                               std::to_string(ref->value),
                           "target.actor_id");
    const sim::Terrain* terrain = project.terrain.grid ? &*project.terrain.grid : nullptr;
    const sim::Actor actor = build_actor(*config, terrain);
    return shot::generate_shot(
        entry.spec, [actor](double t) { return sim::actor_position_at(actor, t); }, entry.dt);
  }
  return shot::generate_shot(entry.spec, entry.dt);
}

sim::World build_world(const Project& project, const WorldOptions& options) {
  validate(project);
  if (!project.terrain.path.empty() && !project.terrain.grid)
    throw InvalidArgument("terrain file '" + project.terrain.path + "' has not been loaded",
                          "terrain.path");

  sim::World world;
  world.config = project.sim;
  world.terrain = project.terrain.grid;
  world.wind = project.wind;
  const sim::Terrain* terrain = world.terrain ? &*world.terrain : nullptr;
  for (const ActorConfig& a : project.actors) world.actors.push_back(build_actor(a, terrain));

  for (const DroneConfig& d : project.drones) {
    sim::DroneState initial{d.position, {}, d.yaw, d.gimbal_pitch};
    sim::DroneMode mode = sim::Manual{};
    const bool forced_manual = options.manual_drone == d.id;
    if (!forced_manual) {
      switch (d.assignment) {
        case Assignment::manual: break;
        case Assignment::shot: {
          const ShotEntry* entry = find_shot(project, *d.assignment_id);
          auto trajectory = entry->trajectory ? *entry->trajectory
                                              : generate_for_project(project, *entry);
          mode = sim::FollowTrajectory{
              std::make_shared<const shot::Trajectory>(std::move(trajectory))};
          break;
        }
        case Assignment::scan_plan: {
          const ScanPlanEntry* entry = find_scan_plan(project, *d.assignment_id);
          const scan::ScanPlan plan =
              entry->plan ? *entry->plan : scan::plan_scan(entry->area, entry->config);
          mode = sim::FollowPlan{std::make_shared<const flightplan::FlightPlan>(
              flightplan::scan_plan_to_flight_plan(plan, project.origin,
                                                   entry->config.cruise_speed))};
          break;
        }
        case Assignment::recording: {
          const RecordingEntry* entry = find_recording(project, *d.assignment_id);
          mode = sim::FollowPlan{std::make_shared<const flightplan::FlightPlan>(entry->plan)};
          break;
        }
      }
    }
    sim::Drone drone = sim::make_drone(d.id, std::move(mode), initial, d.limits, d.camera);
    drone.recording = forced_manual || options.record_all;
    world.drones.push_back(std::move(drone));
  }
  if (options.manual_drone && !find_drone(project, *options.manual_drone))
    throw NotFound("drone " + std::to_string(*options.manual_drone) + " does not exist", "drone_id");
  sim::begin_recordings(world);
  return world;
}

}  // namespace dronecine::project
