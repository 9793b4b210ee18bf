#include "dronecine/flightplan_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dronecine/errors.hpp"
#include "dronecine/format.hpp"

namespace dronecine::io {

namespace {

constexpr int kCmdWaypoint = 16;
constexpr int kCmdChangeSpeed = 178;
constexpr int kCmdMountControl = 205;
constexpr int kCmdImageCapture = 2000;
constexpr int kFrameMission = 2;
constexpr int kFrameRelativeAlt = 3;
constexpr int kCoordinateDecimals = 12;

// Strings starting with this byte are emitted verbatim, without quotes.
constexpr char kRawMarker = '\x01';

Json raw_number(std::string text) { return std::string(1, kRawMarker) + std::move(text); }

bool is_inline(const Json& j) {
  for (const auto& v : j)
    if (v.is_structured()) return false;
  return true;
}

void emit(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : j.items()) {  // std::map: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(item.key()).dump() + ": ";
        emit(item.value(), depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (is_inline(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], depth + 1, out);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::string: {
      const auto& s = j.get_ref<const std::string&>();
      if (!s.empty() && s.front() == kRawMarker) {
        out.append(s, 1);
      } else {
        out += j.dump();
      }
      return;
    }
    case Json::value_t::number_float:
      out += format_shortest(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

geometry::Geodetic to_geodetic(const geometry::GeoOrigin& origin, const geometry::EnuPoint& p,
                               std::size_t index) {
  try {
    return geometry::enu_to_geodetic(origin, p);
  } catch (const Error& e) {
    throw ExportError("waypoint " + std::to_string(index) + ": " + e.what(),
                      "waypoints[" + std::to_string(index) + "]");
  }
}

void validate_for_export(const flightplan::FlightPlan& plan) {
  try {
    flightplan::validate(plan);
  } catch (const UnsupportedLatitude& e) {
    throw ExportError(e.what(), "origin");
  }
}

Json simple_item(int id, int command, int frame, std::array<double, 7> params) {
  Json p = Json::array();
  for (double v : params) p.push_back(v);
  return {{"autoContinue", true}, {"command", command}, {"doJumpId", id},
          {"frame", frame},       {"params", std::move(p)}, {"type", "SimpleItem"}};
}

std::string fixed(double v, int decimals) { return format_fixed(v, decimals); }

}  // namespace

// ---------------------------------------------------------------------------

std::string export_qgc_plan(const flightplan::FlightPlan& plan) {
  validate_for_export(plan);
  const auto& origin = plan.origin;
  const double first_speed = plan.waypoints.front().speed;

  Json items = Json::array();
  int id = 1;
  double speed = first_speed;
  double pitch = 0.0;
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const auto& w = plan.waypoints[i];
    if (w.speed != speed) {
      items.push_back(simple_item(id++, kCmdChangeSpeed, kFrameMission, {1, w.speed, -1, 0, 0, 0, 0}));
      speed = w.speed;
    }
    if (w.gimbal_pitch != pitch) {
      items.push_back(simple_item(id++, kCmdMountControl, kFrameMission,
                                  {-w.gimbal_pitch, 0, 0, 0, 0, 0, 2}));
      pitch = w.gimbal_pitch;
    }
    const auto g = to_geodetic(origin, w.position, i);
    Json item = simple_item(id++, kCmdWaypoint, kFrameRelativeAlt, {0, 0, 0, w.heading, 0, 0, w.position.up});
    item["params"][4] = raw_number(fixed(g.latitude, kCoordinateDecimals));
    item["params"][5] = raw_number(fixed(g.longitude, kCoordinateDecimals));
    items.push_back(std::move(item));
    if (w.capture)
      items.push_back(simple_item(id++, kCmdImageCapture, kFrameMission, {0, 0, 1, 0, 0, 0, 0}));
  }

  Json doc = {
      {"fileType", "Plan"},
      {"geoFence", {{"circles", Json::array()}, {"polygons", Json::array()}, {"version", 2}}},
      {"groundStation", "QGroundControl"},
      {"mission",
       {{"cruiseSpeed", first_speed},
        {"firmwareType", 12},
        {"hoverSpeed", first_speed},
        {"items", std::move(items)},
        {"plannedHomePosition", Json::array({origin.latitude, origin.longitude, origin.altitude})},
        {"vehicleType", 2},
        {"version", 2}}},
      {"rallyPoints", {{"points", Json::array()}, {"version", 2}}},
      {"version", 1}};
  std::string out;
  emit(doc, 0, out);
  out += "\n";
  return out;
}

flightplan::FlightPlan import_qgc_plan(std::string_view document) {
  const Json doc = parse_json(document);
  if (!doc.is_object()) throw ParseError("plan document must be an object", "");
  const auto file_type = doc.find("fileType");
  if (file_type == doc.end() || *file_type != "Plan")
    throw ParseError("fileType must be \"Plan\"", "fileType");
  const auto version = doc.find("version");
  if (version == doc.end() || *version != 1) throw ParseError("unsupported plan version", "version");
  const auto mission = doc.find("mission");
  if (mission == doc.end() || !mission->is_object()) throw ParseError("missing mission", "mission");

  auto number = [](const Json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + " must be a number", path);
    return j.get<double>();
  };

  flightplan::FlightPlan plan;
  const auto home = mission->find("plannedHomePosition");
  if (home == mission->end() || !home->is_array() || home->size() != 3)
    throw ParseError("plannedHomePosition must be [lat, lon, alt]", "mission.plannedHomePosition");
  plan.origin = {number((*home)[0], "mission.plannedHomePosition[0]"),
                 number((*home)[1], "mission.plannedHomePosition[1]"),
                 number((*home)[2], "mission.plannedHomePosition[2]")};
  try {
    geometry::validate(plan.origin);
  } catch (const Error& e) {
    throw ParseError(e.what(), "mission.plannedHomePosition");
  }

  const auto hover = mission->find("hoverSpeed");
  double speed = hover != mission->end() ? number(*hover, "mission.hoverSpeed") : 5.0;
  double pitch = 0.0;

  const auto items = mission->find("items");
  if (items == mission->end() || !items->is_array()) throw ParseError("missing mission.items", "mission.items");
  for (std::size_t i = 0; i < items->size(); ++i) {
    const Json& item = (*items)[i];
    const std::string path = "mission.items[" + std::to_string(i) + "]";
    if (!item.is_object()) throw ParseError(path + " must be an object", path);
    const auto type = item.find("type");
    if (type == item.end() || *type != "SimpleItem")
      throw ParseError("unsupported item type at " + path, path + ".type");
    const auto command = item.find("command");
    if (command == item.end() || !command->is_number_integer())
      throw ParseError("missing command at " + path, path + ".command");
    const auto params = item.find("params");
    if (params == item.end() || !params->is_array() || params->size() != 7)
      throw ParseError(path + ".params must have 7 entries", path + ".params");
    auto param = [&](std::size_t k) {
      return number((*params)[k], path + ".params[" + std::to_string(k) + "]");
    };

    switch (command->get<int>()) {
      case kCmdWaypoint: {
        const auto frame = item.find("frame");
        if (frame == item.end() || *frame != kFrameRelativeAlt)
          throw ParseError("waypoint frame must be relative altitude (3) at " + path, path + ".frame");
        const geometry::Geodetic g{param(4), param(5), plan.origin.altitude + param(6)};
        geometry::EnuPoint p = geometry::geodetic_to_enu(plan.origin, g);
        p.up = param(6);
        plan.waypoints.push_back({p, speed, param(3), pitch, false});
        break;
      }
      case kCmdChangeSpeed:
        speed = param(1);
        break;
      case kCmdMountControl:
        pitch = -param(0);
        break;
      case kCmdImageCapture:
        if (plan.waypoints.empty())
          throw ParseError("image capture before any waypoint at " + path, path);
        plan.waypoints.back().capture = true;
        break;
      default:
        throw ParseError("unsupported command " + std::to_string(command->get<int>()) + " at " + path,
                         path + ".command");
    }
  }
  try {
    flightplan::validate(plan);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), e.field());
  }
  return plan;
}

std::string export_litchi_csv(const flightplan::FlightPlan& plan) {
  validate_for_export(plan);
  std::string out =
      "latitude,longitude,altitude(m),heading(deg),curvesize(m),rotationdir,gimbalmode,"
      "gimbalpitchangle,actiontype1\n";
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const auto& w = plan.waypoints[i];
    const auto g = to_geodetic(plan.origin, w.position, i);
    out += fixed(g.latitude, 7) + "," + fixed(g.longitude, 7) + "," + fixed(w.position.up, 2) + "," +
           fixed(w.heading, 2) + ",0,0,2," + fixed(-w.gimbal_pitch, 2) + "," +
           (w.capture ? "1" : "-1") + "\n";
  }
  return out;
}

std::string export_capture_manifest(const scan::ScanPlan& plan, const geometry::GeoOrigin& origin) {
  try {
    geometry::validate(origin);
  } catch (const Error& e) {
    throw ExportError(e.what(), "origin");
  }
  std::string out = "index,latitude,longitude,altitude_m,heading_deg,gimbal_pitch_deg\n";
  std::size_t index = 0;
  for (const auto& layer : plan.layers)
    for (const auto& leg : layer.legs)
      for (const auto& c : leg.captures) {
        const auto g = to_geodetic(origin, c.position, index);
        out += std::to_string(index) + "," + fixed(g.latitude, 7) + "," + fixed(g.longitude, 7) + "," +
               fixed(g.altitude, 3) + "," + fixed(c.yaw, 2) + "," + fixed(c.gimbal_pitch, 2) + "\n";
        ++index;
      }
  return out;
}

// ---------------------------------------------------------------------------

std::string save_project(const project::Project& project) {
  project::validate(project);
  return dump_json(to_json(project));
}

project::Project load_project(std::string_view document) {
  project::Project p = project_from_json(parse_json(document));
  project::validate(p);
  return p;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string(), "path");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kDocumentKey = "document";

Json with_header(const char* kind, Json body) {
  body[kDocumentKey] = kind;
  body["schema_version"] = project::kSchemaVersion;
  return body;
}

Json strip_header(std::string_view text, const char* kind) {
  Json j = parse_json(text);
  if (!j.is_object()) throw ParseError("document must be an object", "");
  const auto doc = j.find(kDocumentKey);
  if (doc == j.end() || *doc != kind)
    throw ParseError(std::string("expected a ") + kind + " document", kDocumentKey);
  const auto version = j.find("schema_version");
  if (version == j.end() || *version != project::kSchemaVersion)
    throw VersionError("unsupported schema_version", "schema_version");
  j.erase(kDocumentKey);
  j.erase("schema_version");
  return j;
}

// Splits the named members off `j` into their own object, leaving the rest.
Json take(Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field ") + key, key);
  Json out = std::move(*it);
  j.erase(key);
  return out;
}

void reject_leftovers(const Json& j) {
  if (!j.empty()) throw VersionError("unknown field " + j.begin().key(), j.begin().key());
}

}  // namespace

void resolve_terrain(project::Project& project, const std::filesystem::path& base_dir) {
  if (project.terrain.path.empty() || project.terrain.grid) return;
  const std::filesystem::path file = base_dir / project.terrain.path;
  project.terrain.grid = terrain_from_json(parse_json(read_file(file)), "terrain");
  project::validate(project);
}

DocumentKind detect_document(std::string_view document) {
  const Json j = parse_json(document);
  if (!j.is_object()) throw ParseError("document must be an object", "");
  if (j.value("fileType", "") == "Plan") return DocumentKind::qgc_plan;
  if (const auto doc = j.find(kDocumentKey); doc != j.end()) {
    if (*doc == "scan_plan") return DocumentKind::scan_plan;
    if (*doc == "trajectory") return DocumentKind::trajectory;
    if (*doc == "flight_plan") return DocumentKind::flight_plan;
    throw ParseError("unknown document kind", kDocumentKey);
  }
  if (j.contains("schema_version")) return DocumentKind::project;
  throw ParseError("unrecognized document", "");
}

std::string save_scan_plan_document(const ScanPlanDocument& doc) {
  return dump_json(with_header("scan_plan", {{"origin", to_json(doc.origin)},
                                             {"area", to_json(doc.area)},
                                             {"config", to_json(doc.config)},
                                             {"plan", to_json(doc.plan)}}));
}

ScanPlanDocument load_scan_plan_document(std::string_view document) {
  Json j = strip_header(document, "scan_plan");
  ScanPlanDocument doc;
  doc.origin = origin_from_json(take(j, "origin"), "origin");
  doc.area = area_from_json(take(j, "area"), "area");
  doc.config = scan_config_from_json(take(j, "config"), "config");
  doc.plan = scan_plan_from_json(take(j, "plan"), "plan");
  reject_leftovers(j);
  return doc;
}

std::string save_trajectory_document(const TrajectoryDocument& doc) {
  return dump_json(with_header("trajectory", {{"origin", to_json(doc.origin)},
                                              {"spec", to_json(doc.spec)},
                                              {"trajectory", to_json(doc.trajectory)}}));
}

TrajectoryDocument load_trajectory_document(std::string_view document) {
  Json j = strip_header(document, "trajectory");
  TrajectoryDocument doc;
  doc.origin = origin_from_json(take(j, "origin"), "origin");
  doc.spec = shot_spec_from_json(take(j, "spec"), "spec");
  doc.trajectory = trajectory_from_json(take(j, "trajectory"), "trajectory");
  reject_leftovers(j);
  return doc;
}

std::string save_flight_plan_document(const flightplan::FlightPlan& plan) {
  flightplan::validate(plan);
  return dump_json(with_header("flight_plan", to_json(plan)));
}

flightplan::FlightPlan load_flight_plan_document(std::string_view document) {
  const Json j = strip_header(document, "flight_plan");
  flightplan::FlightPlan plan = flight_plan_from_json(j, "");
  flightplan::validate(plan);
  return plan;
}

}  // namespace dronecine::io
