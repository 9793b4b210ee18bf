#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "dronecine/geometry.hpp"

namespace dronecine::shot {

using geometry::CameraIntrinsics;
using geometry::EnuPoint;
using geometry::Pose;

enum class ShotType { establish, chase, flyby, elevator, orbit };

std::string_view to_string(ShotType type);
ShotType parse_shot_type(std::string_view name);

struct ActorId {
  int value = 0;
  friend auto operator<=>(const ActorId&, const ActorId&) = default;
};

/// Either a fixed point or an actor resolved by the caller.
using TargetRef = std::variant<EnuPoint, ActorId>;

// Distances are metres, angles degrees, speed m/s. Heights are measured above
// the target. Defaults are tunable implementation choices.
struct ShotSpec {
  ShotType type = ShotType::orbit;
  TargetRef target = EnuPoint{};
  double height = 20.0;
  double speed = 5.0;

  double orbit_radius = 30.0;
  double orbit_start_angle_deg = 0.0;  // counter-clockwise from east
  double orbit_arc_deg = 360.0;        // signed; positive is counter-clockwise

  double chase_distance = 10.0;
  double chase_duration_s = 20.0;

  double flyby_offset = 15.0;
  double flyby_length = 100.0;

  double establish_start_distance = 80.0;
  double establish_end_distance = 20.0;
  double establish_end_height = 10.0;

  double elevator_distance = 15.0;
  double elevator_start_height = 5.0;
  double elevator_end_height = 45.0;

  // FLYBY/ESTABLISH: direction of travel. ELEVATOR: direction from the target
  // to the climb anchor. Clockwise from north.
  double bearing_deg = 0.0;

  CameraIntrinsics camera = CameraIntrinsics::reference();

  friend bool operator==(const ShotSpec&, const ShotSpec&) = default;
};
void validate(const ShotSpec& spec);

struct TrajectorySample {
  double time = 0.0;
  Pose pose;
  std::optional<EnuPoint> aim_point;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct Trajectory {
  double dt = 0.05;
  std::vector<TrajectorySample> samples;

  double duration() const { return samples.empty() ? 0.0 : samples.back().time; }
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

using TargetPath = std::function<EnuPoint(double)>;

struct Aim {
  double yaw = 0.0;
  double gimbal_pitch = 0.0;
  bool clamped = false;  // true when the pitch hit the gimbal's mechanical range
};

/// Yaw toward the target and pitch below the horizon. Directly above or
/// below the target the bearing is undefined and `previous_yaw` is kept.
Aim aim_gimbal(const EnuPoint& drone_position, const EnuPoint& target, double previous_yaw = 0.0);

/// Time the shot takes at spec.speed, excluding CHASE which is time-boxed.
double shot_duration(const ShotSpec& spec);

Trajectory generate_shot(const ShotSpec& spec, const TargetPath& target_path, double dt);
/// Static-target convenience; throws when the shot spec targets an actor.
Trajectory generate_shot(const ShotSpec& spec, double dt);

/// Scales every distance-like parameter so the shot keeps its framing with
/// spec.camera instead of the reference camera.
ShotSpec rescale_shot_params(const ShotSpec& spec, const geometry::ReferenceSetup& ref);

}  // namespace dronecine::shot
