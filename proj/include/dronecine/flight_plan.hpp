#pragma once

#include <span>
#include <vector>

#include "dronecine/geometry.hpp"

namespace dronecine::scan {
struct ScanPlan;
}
namespace dronecine::shot {
struct Trajectory;
}

namespace dronecine::flightplan {

using geometry::EnuPoint;
using geometry::GeoOrigin;
using geometry::Pose;

struct Waypoint {
  EnuPoint position;
  double speed = 5.0;         // m/s on the leg arriving at this waypoint
  double heading = 0.0;       // degrees clockwise from north
  double gimbal_pitch = 0.0;  // degrees below horizon
  bool capture = false;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

struct FlightPlan {
  GeoOrigin origin;
  std::vector<Waypoint> waypoints;

  friend bool operator==(const FlightPlan&, const FlightPlan&) = default;
};

void validate(const FlightPlan& plan);

struct TimedPose {
  double time = 0.0;
  Pose pose;

  friend bool operator==(const TimedPose&, const TimedPose&) = default;
};

// Floor applied to waypoint speeds derived from hovering segments.
inline constexpr double kMinWaypointSpeed = 0.1;

/// Keeps every sample whose index is a multiple of round(interval / sample_dt)
/// plus the final sample. Waypoint speed is the mean speed since the previous
/// kept sample.
FlightPlan downsample_poses(std::span<const TimedPose> samples, double sample_dt,
                            const GeoOrigin& origin, double interval_s);

/// One capture waypoint per planned exposure, in flight order.
FlightPlan scan_plan_to_flight_plan(const scan::ScanPlan& plan, const GeoOrigin& origin,
                                    double cruise_speed);

FlightPlan trajectory_to_flight_plan(const shot::Trajectory& trajectory, const GeoOrigin& origin,
                                     double interval_s = 1.0);

}  // namespace dronecine::flightplan
