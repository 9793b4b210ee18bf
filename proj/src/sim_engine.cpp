#include "dronecine/sim_engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "dronecine/errors.hpp"
#include "dronecine/format.hpp"

namespace dronecine::sim {

using geometry::bearing_deg;
using geometry::heading_vector;
using geometry::normalize_yaw;

std::string_view to_string(ActorKind kind) {
  switch (kind) {
    case ActorKind::car: return "car";
    case ActorKind::cyclist: return "cyclist";
    case ActorKind::boat: return "boat";
  }
  return "car";
}

ActorKind parse_actor_kind(std::string_view name) {
  if (name == "car") return ActorKind::car;
  if (name == "cyclist") return ActorKind::cyclist;
  if (name == "boat") return ActorKind::boat;
  throw InvalidArgument("unknown actor kind '" + std::string(name) + "'", "kind");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::terrain_proximity: return "terrain_proximity";
    case EventKind::actor_proximity: return "actor_proximity";
    case EventKind::out_of_bounds: return "out_of_bounds";
  }
  return "terrain_proximity";
}

// ---------------------------------------------------------------------------
// Actors

namespace {

struct Segment {
  EnuPoint a;
  EnuPoint b;
  double length;
};

std::vector<Segment> segments_of(const Actor& actor) {
  std::vector<Segment> out;
  const auto& p = actor.path;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out.push_back({p[i], p[i + 1], geometry::distance(p[i], p[i + 1])});
  if (actor.loop && p.size() >= 2 && !(p.back() == p.front()))
    out.push_back({p.back(), p.front(), geometry::distance(p.back(), p.front())});
  return out;
}

double segment_yaw(const Segment& s, double fallback) {
  const EnuPoint d = s.b - s.a;
  if (d.east == 0.0 && d.north == 0.0) return fallback;
  return bearing_deg(d.east, d.north);
}

void check_boat_path(const Actor& actor, const Terrain& terrain) {
  auto wet = [&](const EnuPoint& p) { return terrain.is_water(p.east, p.north); };
  const double spacing = terrain.cell_size() * 0.5;
  for (const Segment& s : segments_of(actor)) {
    const auto n = static_cast<std::size_t>(std::ceil(s.length / spacing));
    for (std::size_t k = 0; k <= n; ++k) {
      const double f = n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
      if (!wet(s.a + f * (s.b - s.a)))
        throw InvalidArgument("boat " + std::to_string(actor.id) + " path leaves water cells",
                              "actors." + std::to_string(actor.id) + ".path");
    }
  }
}

}  // namespace

double path_length(const Actor& actor) {
  double total = 0.0;
  for (const Segment& s : segments_of(actor)) total += s.length;
  return total;
}

Pose pose_at_distance(const Actor& actor, double distance) {
  const auto segments = segments_of(actor);
  double total = 0.0;
  for (const Segment& s : segments) total += s.length;
  double d = std::max(0.0, distance);
  if (actor.loop) {
    d = std::fmod(d, total);
  } else if (d >= total) {
    double yaw = actor.pose.yaw;
    for (const Segment& s : segments) yaw = segment_yaw(s, yaw);
    return Pose{actor.path.back(), yaw, 0.0};
  }
  double start = 0.0;
  double yaw = actor.pose.yaw;
  for (const Segment& s : segments) {
    yaw = segment_yaw(s, yaw);
    if (s.length > 0.0 && d < start + s.length) {
      const double f = (d - start) / s.length;
      return Pose{s.a + f * (s.b - s.a), yaw, 0.0};
    }
    start += s.length;
  }
  return Pose{segments.back().b, yaw, 0.0};
}

Actor make_actor(int id, ActorKind kind, std::vector<EnuPoint> path, double speed, bool loop,
                 const Terrain* terrain) {
  const std::string field = "actors." + std::to_string(id);
  if (path.size() < 2) throw InvalidArgument("actor path needs at least 2 waypoints", field + ".path");
  for (const EnuPoint& p : path)
    if (!geometry::is_finite(p)) throw InvalidArgument("actor waypoint must be finite", field + ".path");
  if (!(speed > 0.0) || !std::isfinite(speed))
    throw InvalidArgument("actor speed must be positive", field + ".speed_mps");
  Actor actor;
  actor.id = id;
  actor.kind = kind;
  actor.path = std::move(path);
  actor.speed = speed;
  actor.loop = loop;
  if (!(path_length(actor) > 0.0))
    throw InvalidArgument("actor path has zero length", field + ".path");
  if (kind == ActorKind::boat && terrain) check_boat_path(actor, *terrain);
  // Initial yaw comes from the first segment with horizontal extent.
  double yaw = 0.0;
  for (const Segment& s : segments_of(actor)) {
    const EnuPoint d = s.b - s.a;
    if (d.east != 0.0 || d.north != 0.0) {
      yaw = bearing_deg(d.east, d.north);
      break;
    }
  }
  actor.pose = Pose{actor.path.front(), yaw, 0.0};
  actor.pose = pose_at_distance(actor, 0.0);
  return actor;
}

Actor follow_path(const Actor& actor, double dt) {
  Actor next = actor;
  next.distance = actor.distance + actor.speed * dt;
  if (!actor.loop) next.distance = std::min(next.distance, path_length(actor));
  next.pose = pose_at_distance(next, next.distance);
  return next;
}

EnuPoint actor_position_at(const Actor& actor, double t) {
  return pose_at_distance(actor, actor.distance + actor.speed * t).position;
}

// ---------------------------------------------------------------------------
// Drones

void validate(const DroneLimits& limits) {
  for (auto [v, name] : {std::pair{limits.max_horizontal_speed, "max_horizontal_speed_mps"},
                         std::pair{limits.max_climb_rate, "max_climb_rate_mps"},
                         std::pair{limits.max_yaw_rate, "max_yaw_rate_dps"},
                         std::pair{limits.max_gimbal_rate, "max_gimbal_rate_dps"}}) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(name) + " must be positive", std::string("limits.") + name);
  }
}

Pose drone_pose(const Drone& drone) {
  return Pose{drone.state.position, drone.state.yaw, drone.state.gimbal_pitch};
}

namespace {

// Relative slack when comparing derived speeds against limits.
constexpr double kLimitSlack = 1e-9;

void check_trajectory_limits(const shot::Trajectory& t, const DroneLimits& limits, int id) {
  for (std::size_t k = 1; k < t.samples.size(); ++k) {
    const EnuPoint d = t.samples[k].pose.position - t.samples[k - 1].pose.position;
    const double h = geometry::horizontal_norm(d) / t.dt;
    const double v = std::abs(d.up) / t.dt;
    if (h > limits.max_horizontal_speed * (1.0 + kLimitSlack) ||
        v > limits.max_climb_rate * (1.0 + kLimitSlack))
      throw InvalidArgument("trajectory for drone " + std::to_string(id) +
                                " exceeds the drone's speed limits at sample " + std::to_string(k),
                            "drones." + std::to_string(id) + ".limits");
  }
}

}  // namespace

Drone make_drone(int id, DroneMode mode, const DroneState& initial, const DroneLimits& limits,
                 const CameraIntrinsics& camera) {
  validate(limits);
  const std::string field = "drones." + std::to_string(id);
  if (!geometry::is_finite(initial.position))
    throw InvalidArgument("drone position must be finite", field + ".position");
  Drone drone;
  drone.id = id;
  drone.limits = limits;
  drone.camera = camera;
  drone.state = initial;
  drone.state.yaw = normalize_yaw(initial.yaw);
  drone.state.gimbal_pitch =
      std::clamp(initial.gimbal_pitch, geometry::kMinGimbalPitch, geometry::kMaxGimbalPitch);
  drone.state.velocity = {};

  if (auto* follow = std::get_if<FollowTrajectory>(&mode)) {
    if (!follow->trajectory || follow->trajectory->samples.empty())
      throw InvalidArgument("drone trajectory is empty", field + ".trajectory");
    check_trajectory_limits(*follow->trajectory, limits, id);
    const Pose& p = follow->trajectory->samples.front().pose;
    drone.state.position = p.position;
    drone.state.yaw = p.yaw;
    drone.state.gimbal_pitch = p.gimbal_pitch;
  } else if (auto* plan = std::get_if<FollowPlan>(&mode)) {
    if (!plan->plan || plan->plan->waypoints.empty())
      throw InvalidArgument("drone flight plan is empty", field + ".plan");
    const auto& w = plan->plan->waypoints.front();
    drone.state.position = w.position;
    drone.state.yaw = w.heading;
    drone.state.gimbal_pitch = w.gimbal_pitch;
    plan->next = 1;
  }
  drone.mode = std::move(mode);
  return drone;
}

ControlInput clamp(const ControlInput& input) {
  auto c = [](double v) { return std::isfinite(v) ? std::clamp(v, -1.0, 1.0) : 0.0; };
  return {c(input.forward), c(input.right), c(input.climb), c(input.yaw_rate), c(input.gimbal_rate)};
}

Drone apply_manual_control(const Drone& drone, const ControlInput& raw, const EnuPoint& wind,
                           double dt) {
  const ControlInput in = clamp(raw);
  const DroneLimits& lim = drone.limits;
  const EnuPoint fwd = heading_vector(drone.state.yaw);
  const EnuPoint right{fwd.north, -fwd.east, 0.0};
  EnuPoint command = (in.forward * lim.max_horizontal_speed) * fwd +
                     (in.right * lim.max_horizontal_speed) * right;
  const double h = geometry::horizontal_norm(command);
  if (h > lim.max_horizontal_speed) command = (lim.max_horizontal_speed / h) * command;
  command.up = in.climb * lim.max_climb_rate;

  Drone next = drone;
  next.state.velocity = command + wind;
  next.state.position = drone.state.position + dt * next.state.velocity;
  next.state.yaw = normalize_yaw(drone.state.yaw + in.yaw_rate * lim.max_yaw_rate * dt);
  next.state.gimbal_pitch =
      std::clamp(drone.state.gimbal_pitch + in.gimbal_rate * lim.max_gimbal_rate * dt,
                 geometry::kMinGimbalPitch, geometry::kMaxGimbalPitch);
  return next;
}

namespace {

void advance_follow_trajectory(Drone& drone, const shot::Trajectory& t, double time, double dt) {
  const auto& samples = t.samples;
  const double u = time / t.dt;
  const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(u + 1e-9)));
  const EnuPoint before = drone.state.position;
  if (k + 1 >= samples.size()) {
    const Pose& p = samples.back().pose;
    drone.state.position = p.position;
    drone.state.yaw = p.yaw;
    drone.state.gimbal_pitch = p.gimbal_pitch;
  } else {
    const double f = u - static_cast<double>(k);
    const Pose& a = samples[k].pose;
    const Pose& b = samples[k + 1].pose;
    drone.state.position = f < 1e-9 ? a.position : a.position + f * (b.position - a.position);
    drone.state.yaw = a.yaw;
    drone.state.gimbal_pitch = a.gimbal_pitch;
  }
  drone.state.velocity = (1.0 / dt) * (drone.state.position - before);
}

void advance_follow_plan(Drone& drone, FollowPlan& mode, double dt) {
  const auto& waypoints = mode.plan->waypoints;
  const EnuPoint before = drone.state.position;
  double remaining = dt;
  while (mode.next < waypoints.size() && remaining > 0.0) {
    const auto& target = waypoints[mode.next];
    drone.state.yaw = target.heading;
    drone.state.gimbal_pitch = target.gimbal_pitch;
    const EnuPoint gap = target.position - drone.state.position;
    const double dist = geometry::norm(gap);
    if (dist == 0.0) {
      ++mode.next;
      continue;
    }
    const double hf = geometry::horizontal_norm(gap) / dist;
    const double vf = std::abs(gap.up) / dist;
    double speed = target.speed;
    if (hf > 0.0) speed = std::min(speed, drone.limits.max_horizontal_speed / hf);
    if (vf > 0.0) speed = std::min(speed, drone.limits.max_climb_rate / vf);
    const double needed = dist / speed;
    if (needed <= remaining) {
      drone.state.position = target.position;
      remaining -= needed;
      ++mode.next;
    } else {
      drone.state.position = drone.state.position + (speed * remaining / dist) * gap;
      remaining = 0.0;
    }
  }
  drone.state.velocity = (1.0 / dt) * (drone.state.position - before);
}

void append_recordings(World& world) {
  for (const Drone& d : world.drones) {
    if (!d.recording) continue;
    auto& rec = world.recordings[d.id];
    rec.drone_id = d.id;
    rec.dt = world.config.tick;
    rec.samples.push_back({world.time(), drone_pose(d)});
  }
}

void detect_events(const World& world, std::vector<SimEvent>& events) {
  const double t = world.time();
  for (const Drone& d : world.drones) {
    const EnuPoint& p = d.state.position;
    if (world.terrain) {
      if (!world.terrain->contains(p.east, p.north)) {
        events.push_back({t, world.tick, EventKind::out_of_bounds, {d.id},
                          world.terrain->signed_edge_distance(p.east, p.north)});
      } else {
        const double agl = p.up - terrain_height_at(*world.terrain, p.east, p.north);
        if (agl < world.config.terrain_threshold)
          events.push_back({t, world.tick, EventKind::terrain_proximity, {d.id}, agl});
      }
    } else if (p.up < world.config.terrain_threshold) {
      events.push_back({t, world.tick, EventKind::terrain_proximity, {d.id}, p.up});
    }
    for (const Actor& a : world.actors) {
      const double dist = geometry::distance(p, a.pose.position);
      if (dist < world.config.actor_threshold)
        events.push_back({t, world.tick, EventKind::actor_proximity, {d.id, a.id}, dist});
    }
  }
}

}  // namespace

void validate(const Wind& wind) {
  if (!geometry::is_finite(wind.mean)) throw InvalidArgument("wind mean must be finite", "wind.mean_mps");
  if (!(wind.gust_amplitude >= 0.0) || !std::isfinite(wind.gust_amplitude))
    throw InvalidArgument("gust amplitude must be non-negative", "wind.gust_amplitude_mps");
  if (!(wind.gust_period > 0.0) || !std::isfinite(wind.gust_period))
    throw InvalidArgument("gust period must be positive", "wind.gust_period_s");
}

double gust_phase(std::int64_t seed) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(seed));
  const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return unit * 2.0 * geometry::kPi;
}

EnuPoint wind_velocity(const Wind& wind, double t) {
  if (wind.gust_amplitude == 0.0) return wind.mean;
  const double m = geometry::norm(wind.mean);
  const EnuPoint unit = m > 0.0 ? (1.0 / m) * wind.mean : EnuPoint{1.0, 0.0, 0.0};
  const double gust =
      wind.gust_amplitude *
      std::sin(2.0 * geometry::kPi * t / wind.gust_period + gust_phase(wind.phase_seed));
  return wind.mean + gust * unit;
}

void validate(const SimConfig& config) {
  if (!(config.tick > 0.0) || !std::isfinite(config.tick))
    throw InvalidArgument("tick must be positive", "sim.tick_s");
  if (!(config.terrain_threshold >= 0.0))
    throw InvalidArgument("terrain threshold must be non-negative", "sim.terrain_threshold_m");
  if (!(config.actor_threshold >= 0.0))
    throw InvalidArgument("actor threshold must be non-negative", "sim.actor_threshold_m");
}

void begin_recordings(World& world) {
  for (const Drone& d : world.drones) {
    if (!d.recording) continue;
    world.recordings[d.id] = Recording{d.id, world.config.tick, {{world.time(), drone_pose(d)}}};
  }
}

std::vector<SimEvent> advance(World& world, double dt) {
  if (dt != world.config.tick)
    throw InvalidArgument("simulation only steps at its fixed tick of " +
                              format_shortest(world.config.tick) + " s",
                          "dt_s");
  const double t0 = world.time();
  const double t1 = static_cast<double>(world.tick + 1) * world.config.tick;

  for (Actor& a : world.actors) a = follow_path(a, dt);

  const EnuPoint wind = wind_velocity(world.wind, t0);
  for (Drone& d : world.drones) {
    if (std::holds_alternative<Manual>(d.mode)) {
      const auto it = world.controls.find(d.id);
      const ControlInput input = it == world.controls.end() ? ControlInput{} : it->second;
      d = apply_manual_control(d, input, wind, dt);
    } else if (auto* follow = std::get_if<FollowTrajectory>(&d.mode)) {
      advance_follow_trajectory(d, *follow->trajectory, t1, dt);
    } else if (auto* plan = std::get_if<FollowPlan>(&d.mode)) {
      advance_follow_plan(d, *plan, dt);
    }
  }
  world.controls.clear();
  ++world.tick;

  append_recordings(world);
  std::vector<SimEvent> events;
  detect_events(world, events);
  return events;
}

StepResult step(World world, double dt) {
  auto events = advance(world, dt);
  return {std::move(world), std::move(events)};
}

double landmark_coverage(const shot::Trajectory& trajectory, const CameraIntrinsics& camera,
                         const EnuPoint& landmark) {
  if (trajectory.samples.empty()) throw InvalidArgument("trajectory is empty", "trajectory");
  std::size_t visible = 0;
  for (const auto& s : trajectory.samples)
    if (!(s.pose.position == landmark) && geometry::point_in_frustum(s.pose, camera, landmark))
      ++visible;
  return static_cast<double>(visible) / static_cast<double>(trajectory.samples.size());
}

double landmark_coverage(const Recording& recording, const CameraIntrinsics& camera,
                         const EnuPoint& landmark) {
  if (recording.samples.empty()) throw InvalidArgument("recording is empty", "recording");
  std::size_t visible = 0;
  for (const auto& s : recording.samples)
    if (!(s.pose.position == landmark) && geometry::point_in_frustum(s.pose, camera, landmark))
      ++visible;
  return static_cast<double>(visible) / static_cast<double>(recording.samples.size());
}

flightplan::FlightPlan record_and_export(const Recording& recording,
                                         const geometry::GeoOrigin& origin, double interval_s) {
  if (recording.samples.size() < 2)
    throw InvalidArgument("recording needs at least two samples to export", "recording");
  return flightplan::downsample_poses(recording.samples, recording.dt, origin, interval_s);
}

// ---------------------------------------------------------------------------
// Replay logs and traces

namespace {

constexpr std::string_view kInputLogHeader = "tick,drone_id,forward,right,climb,yaw_rate,gimbal_rate";

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError("input log line " + std::to_string(line) + ": bad number '" +
                         std::string(text) + "'",
                     "line " + std::to_string(line));
  return value;
}

}  // namespace

std::string write_input_log(const std::vector<ControlRecord>& records) {
  std::string out(kInputLogHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.tick) + ',' + std::to_string(r.drone_id) + ',' +
           format_shortest(r.input.forward) + ',' + format_shortest(r.input.right) + ',' +
           format_shortest(r.input.climb) + ',' + format_shortest(r.input.yaw_rate) + ',' +
           format_shortest(r.input.gimbal_rate) + '\n';
  }
  return out;
}

std::vector<ControlRecord> parse_input_log(std::string_view text) {
  std::vector<ControlRecord> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#' || line == kInputLogHeader) continue;

    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 7)
      throw ParseError("input log line " + std::to_string(line_no) + ": expected 7 fields, got " +
                           std::to_string(fields.size()),
                       "line " + std::to_string(line_no));
    ControlRecord r;
    r.tick = parse_number<std::uint64_t>(fields[0], line_no);
    r.drone_id = parse_number<int>(fields[1], line_no);
    r.input.forward = parse_number<double>(fields[2], line_no);
    r.input.right = parse_number<double>(fields[3], line_no);
    r.input.climb = parse_number<double>(fields[4], line_no);
    r.input.yaw_rate = parse_number<double>(fields[5], line_no);
    r.input.gimbal_rate = parse_number<double>(fields[6], line_no);
    out.push_back(r);
  }
  return out;
}

namespace {

void append_trace(const World& world, std::vector<TraceRow>& trace) {
  for (const Drone& d : world.drones)
    trace.push_back({world.tick, world.time(), true, d.id, drone_pose(d), d.state.velocity});
  for (const Actor& a : world.actors)
    trace.push_back({world.tick, world.time(), false, a.id, a.pose, {}});
}

}  // namespace

SimRun run_headless(World world, std::uint64_t ticks, const std::vector<ControlRecord>& inputs) {
  std::map<std::uint64_t, std::vector<const ControlRecord*>> by_tick;
  for (const auto& r : inputs) by_tick[r.tick].push_back(&r);

  SimRun run;
  append_trace(world, run.trace);
  for (std::uint64_t k = 0; k < ticks; ++k) {
    if (const auto it = by_tick.find(world.tick); it != by_tick.end())
      for (const ControlRecord* r : it->second) world.controls[r->drone_id] = r->input;
    auto events = advance(world, world.config.tick);
    run.events.insert(run.events.end(), events.begin(), events.end());
    append_trace(world, run.trace);
  }
  run.final_world = std::move(world);
  return run;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "tick,time_s,type,id,east_m,north_m,up_m,yaw_deg,gimbal_pitch_deg,vel_east_mps,"
         "vel_north_mps,vel_up_mps\n";
  for (const auto& r : trace) {
    out << r.tick << ',' << format_shortest(r.time) << ',' << (r.is_drone ? "drone" : "actor")
        << ',' << r.id << ',' << format_shortest(r.pose.position.east) << ','
        << format_shortest(r.pose.position.north) << ',' << format_shortest(r.pose.position.up)
        << ',' << format_shortest(r.pose.yaw) << ',' << format_shortest(r.pose.gimbal_pitch)
        << ',' << format_shortest(r.velocity.east) << ',' << format_shortest(r.velocity.north)
        << ',' << format_shortest(r.velocity.up) << '\n';
  }
  return out.str();
}

std::string events_to_csv(const std::vector<SimEvent>& events) {
  std::ostringstream out;
  out << "tick,time_s,kind,subjects,distance_m\n";
  for (const auto& e : events) {
    out << e.tick << ',' << format_shortest(e.time) << ',' << to_string(e.kind) << ',';
    for (std::size_t i = 0; i < e.subjects.size(); ++i) out << (i ? ";" : "") << e.subjects[i];
    out << ',' << format_shortest(e.distance) << '\n';
  }
  return out.str();
}

}  // namespace dronecine::sim
