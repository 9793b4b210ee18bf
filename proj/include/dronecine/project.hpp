#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dronecine/flight_plan.hpp"
#include "dronecine/geometry.hpp"
#include "dronecine/scan_planner.hpp"
#include "dronecine/shot_grammar.hpp"
#include "dronecine/sim_engine.hpp"

namespace dronecine::project {

using geometry::CameraIntrinsics;
using geometry::EnuPoint;
using geometry::GeoOrigin;

inline constexpr int kSchemaVersion = 1;

// Visual-only scene settings, carried for clients.
struct SceneMetadata {
  double time_of_day_h = 12.0;
  double lighting = 1.0;
  double cloud_thickness = 0.0;
  double cloud_speed_mps = 0.0;

  friend bool operator==(const SceneMetadata&, const SceneMetadata&) = default;
};

// Either a file path (resolved relative to the project file) or an inline grid.
struct TerrainRef {
  std::string path;
  std::optional<sim::Terrain> grid;

  bool empty() const { return path.empty() && !grid; }
  friend bool operator==(const TerrainRef&, const TerrainRef&) = default;
};

struct ActorConfig {
  int id = 0;
  sim::ActorKind kind = sim::ActorKind::car;
  std::vector<EnuPoint> path;
  double speed = 5.0;
  bool loop = false;

  friend bool operator==(const ActorConfig&, const ActorConfig&) = default;
};

enum class Assignment { manual, shot, scan_plan, recording };
std::string_view to_string(Assignment a);
Assignment parse_assignment(std::string_view name);

struct DroneConfig {
  int id = 0;
  EnuPoint position;
  double yaw = 0.0;
  double gimbal_pitch = 0.0;
  sim::DroneLimits limits;
  CameraIntrinsics camera = CameraIntrinsics::reference();
  Assignment assignment = Assignment::manual;
  std::optional<int> assignment_id;  // shot, scan plan or recording id

  friend bool operator==(const DroneConfig&, const DroneConfig&) = default;
};

struct ShotEntry {
  int id = 0;
  shot::ShotSpec spec;
  double dt = 0.05;
  std::optional<shot::Trajectory> trajectory;

  friend bool operator==(const ShotEntry&, const ShotEntry&) = default;
};

struct ScanPlanEntry {
  int id = 0;
  scan::ScanArea area;
  scan::ScanConfig config;
  std::optional<scan::ScanPlan> plan;

  friend bool operator==(const ScanPlanEntry&, const ScanPlanEntry&) = default;
};

struct RecordingEntry {
  int id = 0;
  int drone_id = 0;
  flightplan::FlightPlan plan;

  friend bool operator==(const RecordingEntry&, const RecordingEntry&) = default;
};

struct Project {
  int schema_version = kSchemaVersion;
  std::string name;
  GeoOrigin origin;
  TerrainRef terrain;
  std::vector<ActorConfig> actors;
  std::vector<DroneConfig> drones;
  std::vector<ShotEntry> shots;
  std::vector<ScanPlanEntry> scan_plans;
  std::vector<RecordingEntry> recordings;
  SceneMetadata scene;
  sim::Wind wind;
  sim::SimConfig sim;

  friend bool operator==(const Project&, const Project&) = default;
};

/// Field-level validation plus referential integrity. Throws InvalidArgument
/// or IntegrityError naming the offending field or dangling id.
void validate(const Project& project);

const ActorConfig* find_actor(const Project& p, int id);
const DroneConfig* find_drone(const Project& p, int id);
const ShotEntry* find_shot(const Project& p, int id);
const ScanPlanEntry* find_scan_plan(const Project& p, int id);
const RecordingEntry* find_recording(const Project& p, int id);

template <typename T>
int next_id(const std::vector<T>& items) {
  int id = 0;
  for (const auto& item : items) id = std::max(id, item.id);
  return id + 1;
}

sim::Actor build_actor(const ActorConfig& config, const sim::Terrain* terrain);

/// Generates the trajectory for a shot, resolving actor targets against the
/// project's actors at t = 0.
shot::Trajectory generate_for_project(const Project& project, const ShotEntry& entry);

struct WorldOptions {
  std::optional<int> manual_drone;  // forced into manual mode and recorded
  bool record_all = false;
};

/// Builds a simulation world at t = 0 from the project. Shots without a stored
/// trajectory are generated on the fly.
sim::World build_world(const Project& project, const WorldOptions& options = {});

}  // namespace dronecine::project
