// JSON codecs for every persisted type. Field names carry their units.

#include <cmath>
#include <set>
#include <string>

#include "dronecine/errors.hpp"
#include "dronecine/flightplan_io.hpp"

namespace dronecine::io {

using geometry::EnuPoint;

namespace {

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + " must be a number", path);
  return j.get<double>();
}

const Json& as_array(const Json& j, const std::string& path, std::size_t size = 0) {
  if (!j.is_array()) throw ParseError(path + " must be an array", path);
  if (size && j.size() != size)
    throw ParseError(path + " must have " + std::to_string(size) + " elements", path);
  return j;
}

// Strict object reader: every key must be consumed before finish().
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError((path_.empty() ? "document" : path_) + " must be an object", path_);
  }

  std::string sub(std::string_view key) const { return join(path_, key); }

  const Json* find(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const Json& require(const char* key) {
    const Json* v = find(key);
    if (!v) throw ParseError("missing field " + sub(key), sub(key));
    return *v;
  }

  double number(const char* key, double fallback) {
    const Json* v = find(key);
    return v ? as_number(*v, sub(key)) : fallback;
  }

  double number(const char* key) { return as_number(require(key), sub(key)); }

  template <typename Int>
  Int integer(const char* key, Int fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ParseError(sub(key) + " must be an integer", sub(key));
    return v->get<Int>();
  }

  bool boolean(const char* key, bool fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ParseError(sub(key) + " must be a boolean", sub(key));
    return v->get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ParseError(sub(key) + " must be a string", sub(key));
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key()))
        throw VersionError("unknown field " + sub(item.key()) +
                               " (written by a newer schema version?)",
                           sub(item.key()));
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

Json pose_array(const geometry::Pose& p) {
  return Json::array({p.position.east, p.position.north, p.position.up, p.yaw, p.gimbal_pitch});
}

geometry::Pose pose_from_array(const Json& j, const std::string& path) {
  as_array(j, path, 5);
  return {{as_number(j[0], index(path, 0)), as_number(j[1], index(path, 1)),
           as_number(j[2], index(path, 2))},
          as_number(j[3], index(path, 3)),
          as_number(j[4], index(path, 4))};
}

template <typename F>
auto map_array(const Json& j, const std::string& path, F&& f) {
  as_array(j, path);
  std::vector<decltype(f(j, path))> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(f(j[i], index(path, i)));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Geometry

Json to_json(const EnuPoint& p) { return Json::array({p.east, p.north, p.up}); }

EnuPoint enu_from_json(const Json& j, const std::string& path) {
  as_array(j, path, 3);
  return {as_number(j[0], index(path, 0)), as_number(j[1], index(path, 1)),
          as_number(j[2], index(path, 2))};
}

Json to_json(const geometry::GeoOrigin& o) {
  return {{"latitude_deg", o.latitude}, {"longitude_deg", o.longitude}, {"altitude_m", o.altitude}};
}

geometry::GeoOrigin origin_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  geometry::GeoOrigin o;
  o.latitude = r.number("latitude_deg", 0.0);
  o.longitude = r.number("longitude_deg", 0.0);
  o.altitude = r.number("altitude_m", 0.0);
  r.finish();
  return o;
}

Json to_json(const geometry::CameraIntrinsics& c) {
  return {{"sensor_width_mm", c.sensor_width()},
          {"sensor_height_mm", c.sensor_height()},
          {"focal_length_mm", c.focal_length()}};
}

geometry::CameraIntrinsics camera_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  const auto ref = geometry::CameraIntrinsics::reference();
  const double w = r.number("sensor_width_mm", ref.sensor_width());
  const double h = r.number("sensor_height_mm", ref.sensor_height());
  const double f = r.number("focal_length_mm", ref.focal_length());
  r.finish();
  try {
    return {w, h, f};
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), join(path, e.field()));
  }
}

// ---------------------------------------------------------------------------
// Scan planning

Json to_json(const scan::ScanArea& a) {
  return {{"origin_corner", to_json(a.origin_corner)},
          {"length_x_m", a.length_x},
          {"length_y_m", a.length_y},
          {"rotation_deg", a.rotation_deg}};
}

scan::ScanArea area_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  scan::ScanArea a;
  if (const Json* o = r.find("origin_corner")) a.origin_corner = enu_from_json(*o, r.sub("origin_corner"));
  a.length_x = r.number("length_x_m", a.length_x);
  a.length_y = r.number("length_y_m", a.length_y);
  a.rotation_deg = r.number("rotation_deg", a.rotation_deg);
  r.finish();
  return a;
}

Json to_json(const scan::ScanConfig& c) {
  return {{"base_height_m", c.base_height},
          {"avg_building_height_m", c.avg_building_height},
          {"max_building_height_m", c.max_building_height},
          {"in_track_overlap", c.in_track_overlap},
          {"cross_track_overlap", c.cross_track_overlap},
          {"gimbal_pitch_per_layer_deg", c.gimbal_pitch_per_layer},
          {"camera", to_json(c.camera)},
          {"cruise_speed_mps", c.cruise_speed},
          {"both_directions", c.both_directions}};
}

scan::ScanConfig scan_config_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  scan::ScanConfig c;
  c.base_height = r.number("base_height_m", c.base_height);
  c.avg_building_height = r.number("avg_building_height_m", c.avg_building_height);
  c.max_building_height = r.number("max_building_height_m", c.max_building_height);
  c.in_track_overlap = r.number("in_track_overlap", c.in_track_overlap);
  c.cross_track_overlap = r.number("cross_track_overlap", c.cross_track_overlap);
  if (const Json* g = r.find("gimbal_pitch_per_layer_deg")) {
    const std::string p = r.sub("gimbal_pitch_per_layer_deg");
    as_array(*g, p, 3);
    for (std::size_t i = 0; i < 3; ++i) c.gimbal_pitch_per_layer[i] = as_number((*g)[i], index(p, i));
  }
  if (const Json* cam = r.find("camera")) c.camera = camera_from_json(*cam, r.sub("camera"));
  c.cruise_speed = r.number("cruise_speed_mps", c.cruise_speed);
  c.both_directions = r.boolean("both_directions", c.both_directions);
  r.finish();
  return c;
}

Json to_json(const scan::ScanPlan& plan) {
  Json layers = Json::array();
  for (const auto& layer : plan.layers) {
    Json legs = Json::array();
    for (const auto& leg : layer.legs) {
      Json captures = Json::array();
      for (const auto& c : leg.captures) captures.push_back(pose_array(c));
      legs.push_back({{"direction", leg.direction == scan::GridDirection::x ? "x" : "y"},
                      {"offset_m", leg.offset},
                      {"start", to_json(leg.start)},
                      {"end", to_json(leg.end)},
                      {"heading_deg", leg.heading},
                      {"captures", std::move(captures)}});
    }
    layers.push_back({{"height_m", layer.height},
                      {"gimbal_pitch_deg", layer.gimbal_pitch},
                      {"cross_track_spacing_m", layer.cross_track_spacing},
                      {"in_track_spacing_m", layer.in_track_spacing},
                      {"legs", std::move(legs)}});
  }
  return {{"total_image_count", plan.total_image_count}, {"layers", std::move(layers)}};
}

scan::ScanPlan scan_plan_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  scan::ScanPlan plan;
  plan.total_image_count = r.integer<std::size_t>("total_image_count", 0);
  plan.layers = map_array(r.require("layers"), r.sub("layers"), [](const Json& lj, const std::string& lp) {
    Reader lr(lj, lp);
    scan::ScanLayer layer;
    layer.height = lr.number("height_m");
    layer.gimbal_pitch = lr.number("gimbal_pitch_deg");
    layer.cross_track_spacing = lr.number("cross_track_spacing_m");
    layer.in_track_spacing = lr.number("in_track_spacing_m");
    layer.legs = map_array(lr.require("legs"), lr.sub("legs"), [](const Json& gj, const std::string& gp) {
      Reader gr(gj, gp);
      scan::Leg leg;
      const std::string dir = gr.string("direction", "x");
      if (dir != "x" && dir != "y") throw ParseError(gr.sub("direction") + " must be x or y", gr.sub("direction"));
      leg.direction = dir == "x" ? scan::GridDirection::x : scan::GridDirection::y;
      leg.offset = gr.number("offset_m");
      leg.start = enu_from_json(gr.require("start"), gr.sub("start"));
      leg.end = enu_from_json(gr.require("end"), gr.sub("end"));
      leg.heading = gr.number("heading_deg");
      leg.captures = map_array(gr.require("captures"), gr.sub("captures"), pose_from_array);
      gr.finish();
      return leg;
    });
    lr.finish();
    return layer;
  });
  r.finish();
  if (plan.total_image_count != scan::estimate_image_count(plan))
    throw IntegrityError("total_image_count does not match the capture points",
                         r.sub("total_image_count"));
  return plan;
}

Json to_json(const scan::OverlapReport& report) {
  Json layers = Json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"height_m", l.height},
                      {"min_in_track", l.min_in_track},
                      {"max_in_track", l.max_in_track},
                      {"in_track_pairs", l.in_track_pairs},
                      {"min_cross_track", l.min_cross_track ? Json(*l.min_cross_track) : Json()},
                      {"max_cross_track", l.max_cross_track ? Json(*l.max_cross_track) : Json()},
                      {"cross_track_pairs", l.cross_track_pairs}});
  }
  Json warnings = Json::array();
  for (const auto& w : report.warnings) {
    warnings.push_back({{"layer", w.layer},
                        {"axis", w.axis == scan::OverlapAxis::in_track ? "in_track" : "cross_track"},
                        {"achieved", w.achieved},
                        {"threshold", w.threshold}});
  }
  return {{"mode", report.mode == scan::QualityMode::detail ? "detail" : "landscape"},
          {"threshold", report.threshold},
          {"min_in_track", report.min_in_track},
          {"min_cross_track", report.min_cross_track ? Json(*report.min_cross_track) : Json()},
          {"layers", std::move(layers)},
          {"warnings", std::move(warnings)}};
}

// ---------------------------------------------------------------------------
// Shots

Json to_json(const shot::ShotSpec& s) {
  Json target;
  if (const auto* p = std::get_if<EnuPoint>(&s.target)) {
    target = {{"point", to_json(*p)}};
  } else {
    target = {{"actor_id", std::get<shot::ActorId>(s.target).value}};
  }
  return {{"type", shot::to_string(s.type)},
          {"target", std::move(target)},
          {"height_m", s.height},
          {"speed_mps", s.speed},
          {"orbit_radius_m", s.orbit_radius},
          {"orbit_start_angle_deg", s.orbit_start_angle_deg},
          {"orbit_arc_deg", s.orbit_arc_deg},
          {"chase_distance_m", s.chase_distance},
          {"chase_duration_s", s.chase_duration_s},
          {"flyby_offset_m", s.flyby_offset},
          {"flyby_length_m", s.flyby_length},
          {"establish_start_distance_m", s.establish_start_distance},
          {"establish_end_distance_m", s.establish_end_distance},
          {"establish_end_height_m", s.establish_end_height},
          {"elevator_distance_m", s.elevator_distance},
          {"elevator_start_height_m", s.elevator_start_height},
          {"elevator_end_height_m", s.elevator_end_height},
          {"bearing_deg", s.bearing_deg},
          {"camera", to_json(s.camera)}};
}

shot::ShotSpec shot_spec_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  shot::ShotSpec s;
  try {
    s.type = shot::parse_shot_type(r.string("type", "ORBIT"));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), r.sub("type"));
  }
  if (const Json* t = r.find("target")) {
    Reader tr(*t, r.sub("target"));
    const Json* point = tr.find("point");
    const Json* actor = tr.find("actor_id");
    if ((point != nullptr) == (actor != nullptr))
      throw ParseError("target needs exactly one of point or actor_id", r.sub("target"));
    if (point) {
      s.target = enu_from_json(*point, tr.sub("point"));
    } else {
      if (!actor->is_number_integer()) throw ParseError("actor_id must be an integer", tr.sub("actor_id"));
      s.target = shot::ActorId{actor->get<int>()};
    }
    tr.finish();
  }
  s.height = r.number("height_m", s.height);
  s.speed = r.number("speed_mps", s.speed);
  s.orbit_radius = r.number("orbit_radius_m", s.orbit_radius);
  s.orbit_start_angle_deg = r.number("orbit_start_angle_deg", s.orbit_start_angle_deg);
  s.orbit_arc_deg = r.number("orbit_arc_deg", s.orbit_arc_deg);
  s.chase_distance = r.number("chase_distance_m", s.chase_distance);
  s.chase_duration_s = r.number("chase_duration_s", s.chase_duration_s);
  s.flyby_offset = r.number("flyby_offset_m", s.flyby_offset);
  s.flyby_length = r.number("flyby_length_m", s.flyby_length);
  s.establish_start_distance = r.number("establish_start_distance_m", s.establish_start_distance);
  s.establish_end_distance = r.number("establish_end_distance_m", s.establish_end_distance);
  s.establish_end_height = r.number("establish_end_height_m", s.establish_end_height);
  s.elevator_distance = r.number("elevator_distance_m", s.elevator_distance);
  s.elevator_start_height = r.number("elevator_start_height_m", s.elevator_start_height);
  s.elevator_end_height = r.number("elevator_end_height_m", s.elevator_end_height);
  s.bearing_deg = r.number("bearing_deg", s.bearing_deg);
  if (const Json* cam = r.find("camera")) s.camera = camera_from_json(*cam, r.sub("camera"));
  r.finish();
  return s;
}

Json to_json(const shot::Trajectory& t) {
  Json samples = Json::array();
  for (const auto& s : t.samples) {
    Json row = Json::array({s.time, s.pose.position.east, s.pose.position.north,
                            s.pose.position.up, s.pose.yaw, s.pose.gimbal_pitch});
    if (s.aim_point) {
      row.push_back(s.aim_point->east);
      row.push_back(s.aim_point->north);
      row.push_back(s.aim_point->up);
    }
    samples.push_back(std::move(row));
  }
  return {{"dt_s", t.dt}, {"samples", std::move(samples)}};
}

shot::Trajectory trajectory_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  shot::Trajectory t;
  t.dt = r.number("dt_s");
  t.samples = map_array(r.require("samples"), r.sub("samples"), [](const Json& sj, const std::string& sp) {
    as_array(sj, sp);
    if (sj.size() != 6 && sj.size() != 9)
      throw ParseError(sp + " must have 6 or 9 elements", sp);
    auto n = [&](std::size_t i) { return as_number(sj[i], index(sp, i)); };
    shot::TrajectorySample s;
    s.time = n(0);
    s.pose = {{n(1), n(2), n(3)}, n(4), n(5)};
    if (sj.size() == 9) s.aim_point = EnuPoint{n(6), n(7), n(8)};
    return s;
  });
  r.finish();
  return t;
}

// ---------------------------------------------------------------------------
// Flight plans

Json to_json(const flightplan::FlightPlan& plan) {
  Json waypoints = Json::array();
  for (const auto& w : plan.waypoints) {
    waypoints.push_back({{"position", to_json(w.position)},
                         {"speed_mps", w.speed},
                         {"heading_deg", w.heading},
                         {"gimbal_pitch_deg", w.gimbal_pitch},
                         {"capture", w.capture}});
  }
  return {{"origin", to_json(plan.origin)}, {"waypoints", std::move(waypoints)}};
}

flightplan::FlightPlan flight_plan_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  flightplan::FlightPlan plan;
  if (const Json* o = r.find("origin")) plan.origin = origin_from_json(*o, r.sub("origin"));
  plan.waypoints = map_array(r.require("waypoints"), r.sub("waypoints"), [](const Json& wj, const std::string& wp) {
    Reader wr(wj, wp);
    flightplan::Waypoint w;
    w.position = enu_from_json(wr.require("position"), wr.sub("position"));
    w.speed = wr.number("speed_mps", w.speed);
    w.heading = wr.number("heading_deg", w.heading);
    w.gimbal_pitch = wr.number("gimbal_pitch_deg", w.gimbal_pitch);
    w.capture = wr.boolean("capture", w.capture);
    wr.finish();
    return w;
  });
  r.finish();
  return plan;
}

// ---------------------------------------------------------------------------
// Simulation

Json to_json(const sim::Terrain& t) {
  Json j = {{"nx", t.nx()},
            {"ny", t.ny()},
            {"cell_size_m", t.cell_size()},
            {"origin_east_m", t.origin_east()},
            {"origin_north_m", t.origin_north()},
            {"heights_m", t.heights()}};
  if (!t.water().empty()) j["water"] = t.water();
  return j;
}

sim::Terrain terrain_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  const auto nx = r.integer<std::size_t>("nx", 0);
  const auto ny = r.integer<std::size_t>("ny", 0);
  const double cell = r.number("cell_size_m");
  const double oe = r.number("origin_east_m", 0.0);
  const double on = r.number("origin_north_m", 0.0);
  std::vector<double> heights = map_array(r.require("heights_m"), r.sub("heights_m"), as_number);
  std::vector<std::uint8_t> water;
  if (const Json* w = r.find("water")) {
    water = map_array(*w, r.sub("water"), [](const Json& v, const std::string& p) {
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 1)
        throw ParseError(p + " must be 0 or 1", p);
      return static_cast<std::uint8_t>(v.get<int>());
    });
  }
  r.finish();
  try {
    return sim::Terrain(nx, ny, cell, std::move(heights), oe, on, std::move(water));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), path.empty() ? e.field() : path + "." + e.field());
  }
}

Json to_json(const sim::Wind& w) {
  return {{"mean_mps", to_json(w.mean)},
          {"gust_amplitude_mps", w.gust_amplitude},
          {"gust_period_s", w.gust_period},
          {"phase_seed", w.phase_seed}};
}

sim::Wind wind_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  sim::Wind w;
  if (const Json* m = r.find("mean_mps")) w.mean = enu_from_json(*m, r.sub("mean_mps"));
  w.gust_amplitude = r.number("gust_amplitude_mps", w.gust_amplitude);
  w.gust_period = r.number("gust_period_s", w.gust_period);
  w.phase_seed = r.integer<std::int64_t>("phase_seed", w.phase_seed);
  r.finish();
  return w;
}

Json to_json(const sim::DroneLimits& l) {
  return {{"max_horizontal_speed_mps", l.max_horizontal_speed},
          {"max_climb_rate_mps", l.max_climb_rate},
          {"max_yaw_rate_dps", l.max_yaw_rate},
          {"max_gimbal_rate_dps", l.max_gimbal_rate}};
}

sim::DroneLimits limits_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  sim::DroneLimits l;
  l.max_horizontal_speed = r.number("max_horizontal_speed_mps", l.max_horizontal_speed);
  l.max_climb_rate = r.number("max_climb_rate_mps", l.max_climb_rate);
  l.max_yaw_rate = r.number("max_yaw_rate_dps", l.max_yaw_rate);
  l.max_gimbal_rate = r.number("max_gimbal_rate_dps", l.max_gimbal_rate);
  r.finish();
  return l;
}

Json to_json(const sim::SimConfig& c) {
  return {{"tick_s", c.tick},
          {"terrain_threshold_m", c.terrain_threshold},
          {"actor_threshold_m", c.actor_threshold}};
}

sim::SimConfig sim_config_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  sim::SimConfig c;
  c.tick = r.number("tick_s", c.tick);
  c.terrain_threshold = r.number("terrain_threshold_m", c.terrain_threshold);
  c.actor_threshold = r.number("actor_threshold_m", c.actor_threshold);
  r.finish();
  return c;
}

Json to_json(const sim::SimEvent& e) {
  return {{"time_s", e.time},
          {"tick", e.tick},
          {"kind", sim::to_string(e.kind)},
          {"subjects", e.subjects},
          {"distance_m", e.distance}};
}

// ---------------------------------------------------------------------------
// Project

Json to_json(const project::SceneMetadata& s) {
  return {{"time_of_day_h", s.time_of_day_h},
          {"lighting", s.lighting},
          {"cloud_thickness", s.cloud_thickness},
          {"cloud_speed_mps", s.cloud_speed_mps}};
}

project::SceneMetadata scene_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  project::SceneMetadata s;
  s.time_of_day_h = r.number("time_of_day_h", s.time_of_day_h);
  s.lighting = r.number("lighting", s.lighting);
  s.cloud_thickness = r.number("cloud_thickness", s.cloud_thickness);
  s.cloud_speed_mps = r.number("cloud_speed_mps", s.cloud_speed_mps);
  r.finish();
  return s;
}

Json to_json(const project::ActorConfig& a) {
  Json path = Json::array();
  for (const auto& p : a.path) path.push_back(to_json(p));
  return {{"id", a.id},
          {"kind", sim::to_string(a.kind)},
          {"path", std::move(path)},
          {"speed_mps", a.speed},
          {"loop", a.loop}};
}

project::ActorConfig actor_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  project::ActorConfig a;
  a.id = r.integer<int>("id", 0);
  try {
    a.kind = sim::parse_actor_kind(r.string("kind", "car"));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), r.sub("kind"));
  }
  if (const Json* p = r.find("path")) a.path = map_array(*p, r.sub("path"), enu_from_json);
  a.speed = r.number("speed_mps", a.speed);
  a.loop = r.boolean("loop", a.loop);
  r.finish();
  return a;
}

Json to_json(const project::DroneConfig& d) {
  return {{"id", d.id},
          {"position", to_json(d.position)},
          {"yaw_deg", d.yaw},
          {"gimbal_pitch_deg", d.gimbal_pitch},
          {"limits", to_json(d.limits)},
          {"camera", to_json(d.camera)},
          {"assignment", project::to_string(d.assignment)},
          {"assignment_id", d.assignment_id ? Json(*d.assignment_id) : Json()}};
}

project::DroneConfig drone_from_json(const Json& j, const std::string& path) {
  Reader r(j, path);
  project::DroneConfig d;
  d.id = r.integer<int>("id", 0);
  if (const Json* p = r.find("position")) d.position = enu_from_json(*p, r.sub("position"));
  d.yaw = r.number("yaw_deg", d.yaw);
  d.gimbal_pitch = r.number("gimbal_pitch_deg", d.gimbal_pitch);
  if (const Json* l = r.find("limits")) d.limits = limits_from_json(*l, r.sub("limits"));
  if (const Json* c = r.find("camera")) d.camera = camera_from_json(*c, r.sub("camera"));
  try {
    d.assignment = project::parse_assignment(r.string("assignment", "manual"));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(e.what(), r.sub("assignment"));
  }
  if (const Json* id = r.find("assignment_id")) {
    if (!id->is_number_integer()) throw ParseError("assignment_id must be an integer", r.sub("assignment_id"));
    d.assignment_id = id->get<int>();
  }
  r.finish();
  return d;
}

Json to_json(const project::Project& p) {
  Json terrain;
  if (!p.terrain.path.empty()) terrain["path"] = p.terrain.path;
  if (p.terrain.grid) terrain["grid"] = to_json(*p.terrain.grid);

  Json actors = Json::array();
  for (const auto& a : p.actors) actors.push_back(to_json(a));
  Json drones = Json::array();
  for (const auto& d : p.drones) drones.push_back(to_json(d));
  Json shots = Json::array();
  for (const auto& s : p.shots)
    shots.push_back({{"id", s.id},
                     {"spec", to_json(s.spec)},
                     {"dt_s", s.dt},
                     {"trajectory", s.trajectory ? to_json(*s.trajectory) : Json()}});
  Json scans = Json::array();
  for (const auto& s : p.scan_plans)
    scans.push_back({{"id", s.id},
                     {"area", to_json(s.area)},
                     {"config", to_json(s.config)},
                     {"plan", s.plan ? to_json(*s.plan) : Json()}});
  Json recordings = Json::array();
  for (const auto& r : p.recordings)
    recordings.push_back({{"id", r.id}, {"drone_id", r.drone_id}, {"flight_plan", to_json(r.plan)}});

  return {{"schema_version", p.schema_version},
          {"name", p.name},
          {"origin", to_json(p.origin)},
          {"terrain", std::move(terrain)},
          {"actors", std::move(actors)},
          {"drones", std::move(drones)},
          {"shots", std::move(shots)},
          {"scan_plans", std::move(scans)},
          {"recordings", std::move(recordings)},
          {"scene", to_json(p.scene)},
          {"wind", to_json(p.wind)},
          {"sim", to_json(p.sim)}};
}

project::Project project_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("project document must be an object", "");
  const auto version = j.find("schema_version");
  if (version == j.end() || !version->is_number_integer())
    throw ParseError("missing integer schema_version", "schema_version");
  if (version->get<long long>() != project::kSchemaVersion)
    throw VersionError("unsupported schema_version " + std::to_string(version->get<long long>()) +
                           " (supported: " + std::to_string(project::kSchemaVersion) + ")",
                       "schema_version");

  Reader r(j, "");
  project::Project p;
  p.schema_version = r.integer<int>("schema_version", project::kSchemaVersion);
  p.name = r.string("name", "");
  if (const Json* o = r.find("origin")) p.origin = origin_from_json(*o, "origin");
  if (const Json* t = r.find("terrain")) {
    Reader tr(*t, "terrain");
    p.terrain.path = tr.string("path", "");
    if (const Json* g = tr.find("grid")) p.terrain.grid = terrain_from_json(*g, "terrain.grid");
    tr.finish();
  }
  if (const Json* a = r.find("actors")) p.actors = map_array(*a, "actors", actor_from_json);
  if (const Json* d = r.find("drones")) p.drones = map_array(*d, "drones", drone_from_json);
  if (const Json* s = r.find("shots")) {
    p.shots = map_array(*s, "shots", [](const Json& sj, const std::string& sp) {
      Reader sr(sj, sp);
      project::ShotEntry e;
      e.id = sr.integer<int>("id", 0);
      if (const Json* spec = sr.find("spec")) e.spec = shot_spec_from_json(*spec, sr.sub("spec"));
      e.dt = sr.number("dt_s", e.dt);
      if (const Json* t = sr.find("trajectory")) e.trajectory = trajectory_from_json(*t, sr.sub("trajectory"));
      sr.finish();
      return e;
    });
  }
  if (const Json* s = r.find("scan_plans")) {
    p.scan_plans = map_array(*s, "scan_plans", [](const Json& sj, const std::string& sp) {
      Reader sr(sj, sp);
      project::ScanPlanEntry e;
      e.id = sr.integer<int>("id", 0);
      if (const Json* a = sr.find("area")) e.area = area_from_json(*a, sr.sub("area"));
      if (const Json* c = sr.find("config")) e.config = scan_config_from_json(*c, sr.sub("config"));
      if (const Json* pl = sr.find("plan")) e.plan = scan_plan_from_json(*pl, sr.sub("plan"));
      sr.finish();
      return e;
    });
  }
  if (const Json* rec = r.find("recordings")) {
    p.recordings = map_array(*rec, "recordings", [](const Json& rj, const std::string& rp) {
      Reader rr(rj, rp);
      project::RecordingEntry e;
      e.id = rr.integer<int>("id", 0);
      e.drone_id = rr.integer<int>("drone_id", 0);
      e.plan = flight_plan_from_json(rr.require("flight_plan"), rr.sub("flight_plan"));
      rr.finish();
      return e;
    });
  }
  if (const Json* s = r.find("scene")) p.scene = scene_from_json(*s, "scene");
  if (const Json* w = r.find("wind")) p.wind = wind_from_json(*w, "wind");
  if (const Json* s = r.find("sim")) p.sim = sim_config_from_json(*s, "sim");
  r.finish();
  return p;
}

// ---------------------------------------------------------------------------

namespace {

void check_finite_numbers(const Json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw ExportError("refusing to serialize a non-finite number");
  if (j.is_structured())
    for (const auto& child : j) check_finite_numbers(child);
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), "");
  }
}

std::string dump_json(const Json& j) {
  check_finite_numbers(j);
  return j.dump(2) + "\n";
}

}  // namespace dronecine::io
