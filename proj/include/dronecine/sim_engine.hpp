#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dronecine/flight_plan.hpp"
#include "dronecine/geometry.hpp"
#include "dronecine/shot_grammar.hpp"
#include "dronecine/terrain.hpp"

namespace dronecine::sim {

using geometry::CameraIntrinsics;
using geometry::EnuPoint;
using geometry::Pose;

enum class ActorKind { car, cyclist, boat };
std::string_view to_string(ActorKind kind);
ActorKind parse_actor_kind(std::string_view name);

struct Actor {
  int id = 0;
  ActorKind kind = ActorKind::car;
  std::vector<EnuPoint> path;
  double speed = 5.0;
  bool loop = false;
  Pose pose;
  double distance = 0.0;  // arc length travelled, unwrapped

  friend bool operator==(const Actor&, const Actor&) = default;
};

/// Validates the path, places the actor at its first waypoint. Boats are
/// checked against the terrain's water flags when a terrain is given.
Actor make_actor(int id, ActorKind kind, std::vector<EnuPoint> path, double speed, bool loop,
                 const Terrain* terrain = nullptr);

/// Length of one traversal; loops include the closing segment.
double path_length(const Actor& actor);

/// Pose after travelling `distance` metres along the path from its start.
Pose pose_at_distance(const Actor& actor, double distance);

/// Advances by speed * dt of arc length.
Actor follow_path(const Actor& actor, double dt);

/// Position `t` seconds after the actor's current state, without mutating it.
EnuPoint actor_position_at(const Actor& actor, double t);

struct DroneLimits {
  double max_horizontal_speed = 10.0;  // m/s
  double max_climb_rate = 5.0;         // m/s
  double max_yaw_rate = 90.0;          // deg/s
  double max_gimbal_rate = 45.0;       // deg/s

  friend bool operator==(const DroneLimits&, const DroneLimits&) = default;
};
void validate(const DroneLimits& limits);

struct DroneState {
  EnuPoint position;
  EnuPoint velocity;
  double yaw = 0.0;
  double gimbal_pitch = 0.0;

  friend bool operator==(const DroneState&, const DroneState&) = default;
};

struct FollowTrajectory {
  std::shared_ptr<const shot::Trajectory> trajectory;
};

struct FollowPlan {
  std::shared_ptr<const flightplan::FlightPlan> plan;
  std::size_t next = 0;  // index of the waypoint being approached
};

struct Manual {};

using DroneMode = std::variant<Manual, FollowTrajectory, FollowPlan>;

struct Drone {
  int id = 0;
  DroneMode mode = Manual{};
  DroneState state;
  DroneLimits limits;
  CameraIntrinsics camera = CameraIntrinsics::reference();
  bool recording = false;
};

/// Places the drone at the start of its assignment. Trajectories whose
/// per-step speeds exceed the limits are rejected.
Drone make_drone(int id, DroneMode mode, const DroneState& initial, const DroneLimits& limits,
                 const CameraIntrinsics& camera = CameraIntrinsics::reference());

struct Wind {
  EnuPoint mean;
  double gust_amplitude = 0.0;
  double gust_period = 10.0;
  std::int64_t phase_seed = 0;

  friend bool operator==(const Wind&, const Wind&) = default;
};
void validate(const Wind& wind);

/// Gust phase in [0, 2*pi), derived from the seed with a portable generator.
double gust_phase(std::int64_t seed);
EnuPoint wind_velocity(const Wind& wind, double t);

struct ControlInput {
  double forward = 0.0;
  double right = 0.0;
  double climb = 0.0;
  double yaw_rate = 0.0;
  double gimbal_rate = 0.0;

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};
/// Clamps each component to [-1, 1]; non-finite components become 0.
ControlInput clamp(const ControlInput& input);

/// Kinematic manual flight: velocity command from stick input, plus wind,
/// integrated with explicit Euler.
Drone apply_manual_control(const Drone& drone, const ControlInput& input,
                           const EnuPoint& wind, double dt);

enum class EventKind { terrain_proximity, actor_proximity, out_of_bounds };
std::string_view to_string(EventKind kind);

struct SimEvent {
  double time = 0.0;
  std::uint64_t tick = 0;
  EventKind kind = EventKind::terrain_proximity;
  std::vector<int> subjects;  // drone id, then actor id for actor proximity
  double distance = 0.0;

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct Recording {
  int drone_id = 0;
  double dt = 0.05;
  std::vector<flightplan::TimedPose> samples;

  friend bool operator==(const Recording&, const Recording&) = default;
};

struct SimConfig {
  double tick = 0.05;
  double terrain_threshold = 5.0;
  double actor_threshold = 3.0;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};
void validate(const SimConfig& config);

struct World {
  SimConfig config;
  std::optional<Terrain> terrain;
  std::vector<Actor> actors;
  std::vector<Drone> drones;
  Wind wind;
  std::uint64_t tick = 0;
  // Inputs for manual drones, consumed by the next step.
  std::map<int, ControlInput> controls;
  std::map<int, Recording> recordings;

  double time() const { return static_cast<double>(tick) * config.tick; }
};

/// Starts recordings for drones with `recording` set, holding their pose at t.
void begin_recordings(World& world);

/// Advances the world by one fixed tick in place and returns the events raised.
/// Throws InvalidArgument when dt differs from world.config.tick.
std::vector<SimEvent> advance(World& world, double dt);

struct StepResult {
  World world;
  std::vector<SimEvent> events;
};
StepResult step(World world, double dt);

Pose drone_pose(const Drone& drone);

double landmark_coverage(const shot::Trajectory& trajectory, const CameraIntrinsics& camera,
                         const EnuPoint& landmark);
double landmark_coverage(const Recording& recording, const CameraIntrinsics& camera,
                         const EnuPoint& landmark);

flightplan::FlightPlan record_and_export(const Recording& recording,
                                         const geometry::GeoOrigin& origin,
                                         double interval_s = 1.0);

// Replay log: one record per tick and drone.
struct ControlRecord {
  std::uint64_t tick = 0;
  int drone_id = 0;
  ControlInput input;

  friend bool operator==(const ControlRecord&, const ControlRecord&) = default;
};
std::string write_input_log(const std::vector<ControlRecord>& records);
std::vector<ControlRecord> parse_input_log(std::string_view text);

struct TraceRow {
  std::uint64_t tick = 0;
  double time = 0.0;
  bool is_drone = true;
  int id = 0;
  Pose pose;
  EnuPoint velocity;
};

struct SimRun {
  std::vector<TraceRow> trace;
  std::vector<SimEvent> events;
  World final_world;
};

/// Headless run for `ticks` steps; inputs are applied on their tick.
SimRun run_headless(World world, std::uint64_t ticks, const std::vector<ControlRecord>& inputs = {});

std::string trace_to_csv(const std::vector<TraceRow>& trace);
std::string events_to_csv(const std::vector<SimEvent>& events);

}  // namespace dronecine::sim
