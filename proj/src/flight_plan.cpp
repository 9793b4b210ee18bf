#include "dronecine/flight_plan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dronecine/errors.hpp"
#include "dronecine/scan_planner.hpp"
#include "dronecine/shot_grammar.hpp"

namespace dronecine::flightplan {

void validate(const FlightPlan& plan) {
  geometry::validate(plan.origin);
  if (plan.waypoints.empty()) throw InvalidArgument("flight plan has no waypoints", "waypoints");
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const Waypoint& w = plan.waypoints[i];
    const std::string field = "waypoints[" + std::to_string(i) + "]";
    if (!geometry::is_finite(w.position))
      throw InvalidArgument("waypoint position must be finite", field + ".position");
    if (!(w.speed > 0.0) || !std::isfinite(w.speed))
      throw InvalidArgument("waypoint speed must be positive", field + ".speed_mps");
    if (!(w.heading >= 0.0 && w.heading < 360.0))
      throw InvalidArgument("waypoint heading must lie in [0, 360)", field + ".heading_deg");
    if (!(w.gimbal_pitch >= geometry::kMinGimbalPitch &&
          w.gimbal_pitch <= geometry::kMaxGimbalPitch))
      throw InvalidArgument("waypoint gimbal pitch must lie in [-30, 90]",
                            field + ".gimbal_pitch_deg");
  }
}

FlightPlan downsample_poses(std::span<const TimedPose> samples, double sample_dt,
                            const GeoOrigin& origin, double interval_s) {
  if (samples.size() < 2)
    throw InvalidArgument("at least two samples are required to build a flight plan", "samples");
  if (!(sample_dt > 0.0)) throw InvalidArgument("sample dt must be positive", "dt_s");
  if (!(interval_s > 0.0) || !std::isfinite(interval_s))
    throw InvalidArgument("waypoint interval must be positive", "interval_s");

  const auto stride =
      static_cast<std::size_t>(std::max(1.0, std::round(interval_s / sample_dt)));
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < samples.size(); i += stride) kept.push_back(i);
  if (kept.back() != samples.size() - 1) kept.push_back(samples.size() - 1);

  auto segment_speed = [&](std::size_t a, std::size_t b) {
    double length = 0.0;
    for (std::size_t i = a; i < b; ++i)
      length += geometry::distance(samples[i + 1].pose.position, samples[i].pose.position);
    const double elapsed = samples[b].time - samples[a].time;
    const double v = elapsed > 0.0 ? length / elapsed : 0.0;
    return std::max(v, kMinWaypointSpeed);
  };

  FlightPlan plan;
  plan.origin = origin;
  plan.waypoints.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Pose& pose = samples[kept[k]].pose;
    const double speed =
        k == 0 ? segment_speed(kept[0], kept[1]) : segment_speed(kept[k - 1], kept[k]);
    plan.waypoints.push_back({pose.position, speed, pose.yaw, pose.gimbal_pitch, false});
  }
  return plan;
}

FlightPlan scan_plan_to_flight_plan(const scan::ScanPlan& plan, const GeoOrigin& origin,
                                    double cruise_speed) {
  if (!(cruise_speed > 0.0)) throw InvalidArgument("cruise speed must be positive", "cruise_speed_mps");
  FlightPlan out;
  out.origin = origin;
  for (const auto& layer : plan.layers)
    for (const auto& leg : layer.legs)
      for (const auto& capture : leg.captures)
        out.waypoints.push_back(
            {capture.position, cruise_speed, capture.yaw, capture.gimbal_pitch, true});
  if (out.waypoints.empty()) throw InvalidArgument("scan plan has no capture points", "plan");
  return out;
}

FlightPlan trajectory_to_flight_plan(const shot::Trajectory& trajectory, const GeoOrigin& origin,
                                     double interval_s) {
  std::vector<TimedPose> poses;
  poses.reserve(trajectory.samples.size());
  for (const auto& s : trajectory.samples) poses.push_back({s.time, s.pose});
  return downsample_poses(poses, trajectory.dt, origin, interval_s);
}

}  // namespace dronecine::flightplan
