#include "dronecine/shot_grammar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dronecine/errors.hpp"

namespace dronecine::shot {

using geometry::deg_to_rad;
using geometry::heading_vector;
using geometry::rad_to_deg;

std::string_view to_string(ShotType type) {
  switch (type) {
    case ShotType::establish: return "ESTABLISH";
    case ShotType::chase: return "CHASE";
    case ShotType::flyby: return "FLYBY";
    case ShotType::elevator: return "ELEVATOR";
    case ShotType::orbit: return "ORBIT";
  }
  return "ORBIT";
}

ShotType parse_shot_type(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "ESTABLISH") return ShotType::establish;
  if (upper == "CHASE") return ShotType::chase;
  if (upper == "FLYBY") return ShotType::flyby;
  if (upper == "ELEVATOR") return ShotType::elevator;
  if (upper == "ORBIT") return ShotType::orbit;
  throw InvalidArgument("unknown shot type '" + std::string(name) + "'", "shot_type");
}

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument(std::string(field) + " must be positive", field);
}

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(field) + " must be finite", field);
}

}  // namespace

void validate(const ShotSpec& spec) {
  require_positive(spec.height, "height_m");
  require_positive(spec.speed, "speed_mps");
  require_positive(spec.orbit_radius, "orbit_radius_m");
  require_finite(spec.orbit_start_angle_deg, "orbit_start_angle_deg");
  require_finite(spec.orbit_arc_deg, "orbit_arc_deg");
  if (spec.orbit_arc_deg == 0.0 && spec.type == ShotType::orbit)
    throw ZeroLength("orbit arc must be non-zero", "orbit_arc_deg");
  require_positive(spec.chase_distance, "chase_distance_m");
  require_positive(spec.chase_duration_s, "chase_duration_s");
  require_positive(spec.flyby_offset, "flyby_offset_m");
  require_positive(spec.flyby_length, "flyby_length_m");
  require_positive(spec.establish_start_distance, "establish_start_distance_m");
  require_positive(spec.establish_end_distance, "establish_end_distance_m");
  require_positive(spec.establish_end_height, "establish_end_height_m");
  require_positive(spec.elevator_distance, "elevator_distance_m");
  require_positive(spec.elevator_start_height, "elevator_start_height_m");
  require_positive(spec.elevator_end_height, "elevator_end_height_m");
  require_finite(spec.bearing_deg, "bearing_deg");
  if (const auto* p = std::get_if<EnuPoint>(&spec.target); p && !geometry::is_finite(*p))
    throw InvalidArgument("target point must be finite", "target");
}

Aim aim_gimbal(const EnuPoint& drone_position, const EnuPoint& target, double previous_yaw) {
  const EnuPoint d = target - drone_position;
  if (d.east == 0.0 && d.north == 0.0 && d.up == 0.0)
    throw InvalidArgument("cannot aim at a target coincident with the drone", "target");
  const double horizontal = geometry::horizontal_norm(d);
  Aim aim;
  aim.yaw = horizontal > 0.0 ? geometry::bearing_deg(d.east, d.north)
                             : geometry::normalize_yaw(previous_yaw);
  const double pitch = rad_to_deg(std::atan2(-d.up, horizontal));
  aim.gimbal_pitch = std::clamp(pitch, geometry::kMinGimbalPitch, geometry::kMaxGimbalPitch);
  aim.clamped = aim.gimbal_pitch != pitch;
  return aim;
}

namespace {

double establish_length(const ShotSpec& spec) {
  const double dd = spec.establish_start_distance - spec.establish_end_distance;
  const double dh = spec.establish_end_height - spec.height;
  return std::hypot(dd, dh);
}

std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(duration / dt - 1e-9)));
}

EnuPoint add_up(EnuPoint p, double up) {
  p.up += up;
  return p;
}

}  // namespace

double shot_duration(const ShotSpec& spec) {
  switch (spec.type) {
    case ShotType::orbit:
      return std::abs(deg_to_rad(spec.orbit_arc_deg)) * spec.orbit_radius / spec.speed;
    case ShotType::elevator:
      return std::abs(spec.elevator_end_height - spec.elevator_start_height) / spec.speed;
    case ShotType::flyby: return spec.flyby_length / spec.speed;
    case ShotType::establish: return establish_length(spec) / spec.speed;
    case ShotType::chase: return spec.chase_duration_s;
  }
  return 0.0;
}

namespace {

std::vector<EnuPoint> chase_positions(const ShotSpec& spec, const std::vector<EnuPoint>& target,
                                      double dt) {
  const std::size_t n = target.size();
  std::vector<EnuPoint> velocity(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (n < 2) break;
    velocity[k] = k == 0 ? (1.0 / dt) * (target[1] - target[0])
                         : (1.0 / dt) * (target[k] - target[k - 1]);
  }
  // Heading holds through stops; before the first motion it uses the first
  // observed direction.
  std::optional<EnuPoint> heading;
  for (const EnuPoint& v : velocity) {
    const double speed = geometry::norm(v);
    if (speed > 1e-12) {
      heading = (1.0 / speed) * v;
      break;
    }
  }
  if (!heading)
    throw DegenerateHeading("CHASE target is stationary; follow heading is undefined", "target");

  std::vector<EnuPoint> positions;
  positions.reserve(n);
  const double max_step = spec.speed * dt;
  for (std::size_t k = 0; k < n; ++k) {
    const double speed = geometry::norm(velocity[k]);
    if (speed > 1e-12) heading = (1.0 / speed) * velocity[k];
    const EnuPoint commanded = add_up(target[k] - spec.chase_distance * *heading, spec.height);
    if (k == 0) {
      positions.push_back(commanded);
      continue;
    }
    const EnuPoint& prev = positions.back();
    const EnuPoint gap = commanded - prev;
    const double dist = geometry::norm(gap);
    positions.push_back(dist <= max_step ? commanded : prev + (max_step / dist) * gap);
  }
  return positions;
}

}  // namespace

Trajectory generate_shot(const ShotSpec& spec, const TargetPath& target_path, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive", "dt_s");
  validate(spec);
  if (spec.type == ShotType::elevator && spec.elevator_start_height == spec.elevator_end_height)
    throw ZeroLength("ELEVATOR start and end heights are equal", "elevator_end_height_m");
  if (spec.type == ShotType::establish && establish_length(spec) == 0.0)
    throw ZeroLength("ESTABLISH start and end coincide", "establish_end_distance_m");

  const double duration = shot_duration(spec);
  const std::size_t steps = step_count(duration, dt);

  std::vector<double> times(steps + 1);
  std::vector<EnuPoint> targets(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    times[k] = static_cast<double>(k) * dt;
    targets[k] = target_path(times[k]);
  }
  const EnuPoint anchor_target = targets.front();

  std::vector<EnuPoint> positions;
  positions.reserve(steps + 1);
  if (spec.type == ShotType::chase) {
    positions = chase_positions(spec, targets, dt);
  } else {
    for (std::size_t k = 0; k <= steps; ++k) {
      const bool last = times[k] >= duration;
      const double s = std::min(times[k], duration);
      switch (spec.type) {
        case ShotType::orbit: {
          const double sign = spec.orbit_arc_deg < 0.0 ? -1.0 : 1.0;
          const double theta =
              deg_to_rad(spec.orbit_start_angle_deg) + sign * spec.speed / spec.orbit_radius * s;
          positions.push_back(targets[k] + EnuPoint{spec.orbit_radius * std::cos(theta),
                                                    spec.orbit_radius * std::sin(theta),
                                                    spec.height});
          break;
        }
        case ShotType::elevator: {
          EnuPoint p =
              anchor_target + spec.elevator_distance * heading_vector(spec.bearing_deg);
          const double sign = spec.elevator_end_height > spec.elevator_start_height ? 1.0 : -1.0;
          p.up = anchor_target.up + (last ? spec.elevator_end_height
                                          : spec.elevator_start_height + sign * spec.speed * s);
          positions.push_back(p);
          break;
        }
        case ShotType::flyby: {
          const EnuPoint u = heading_vector(spec.bearing_deg);
          const EnuPoint right{u.north, -u.east, 0.0};
          const EnuPoint start =
              anchor_target + spec.flyby_offset * right - (0.5 * spec.flyby_length) * u;
          positions.push_back(add_up(start + (spec.speed * s) * u, spec.height));
          break;
        }
        case ShotType::establish: {
          const EnuPoint u = heading_vector(spec.bearing_deg);
          const EnuPoint start =
              add_up(anchor_target - spec.establish_start_distance * u, spec.height);
          const EnuPoint end =
              add_up(anchor_target - spec.establish_end_distance * u, spec.establish_end_height);
          const double len = establish_length(spec);
          positions.push_back(last ? end : start + (spec.speed * s / len) * (end - start));
          break;
        }
        case ShotType::chase: break;
      }
    }
  }

  Trajectory trajectory;
  trajectory.dt = dt;
  trajectory.samples.reserve(positions.size());
  double yaw = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Aim aim = aim_gimbal(positions[k], targets[k], yaw);
    yaw = aim.yaw;
    trajectory.samples.push_back({times[k], Pose{positions[k], aim.yaw, aim.gimbal_pitch}, targets[k]});
  }
  return trajectory;
}

Trajectory generate_shot(const ShotSpec& spec, double dt) {
  const auto* point = std::get_if<EnuPoint>(&spec.target);
  if (!point)
    throw InvalidArgument("shot targets an actor; a target path is required", "target");
  const EnuPoint fixed = *point;
  return generate_shot(spec, [fixed](double) { return fixed; }, dt);
}

ShotSpec rescale_shot_params(const ShotSpec& spec, const geometry::ReferenceSetup& ref) {
  validate(spec);
  const double k =
      geometry::scale_working_distance(ref, spec.camera, geometry::FootprintAxis::cross_track) /
      ref.working_distance();
  ShotSpec out = spec;
  for (double* d : {&out.height, &out.orbit_radius, &out.chase_distance, &out.flyby_offset,
                    &out.flyby_length, &out.establish_start_distance, &out.establish_end_distance,
                    &out.establish_end_height, &out.elevator_distance, &out.elevator_start_height,
                    &out.elevator_end_height}) {
    *d *= k;
  }
  return out;
}

}  // namespace dronecine::shot
