#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dronecine/flight_plan.hpp"
#include "dronecine/project.hpp"
#include "dronecine/scan_planner.hpp"
#include "dronecine/shot_grammar.hpp"

namespace dronecine::io {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Mission exporters

/// QGroundControl .plan document. Latitude/longitude are written with 12 fixed
/// decimals; every other number uses its shortest exact representation.
std::string export_qgc_plan(const flightplan::FlightPlan& plan);

/// Inverse of export_qgc_plan on the subset it emits (NAV_WAYPOINT,
/// DO_CHANGE_SPEED, DO_MOUNT_CONTROL, IMAGE_START_CAPTURE).
flightplan::FlightPlan import_qgc_plan(std::string_view document);

std::string export_litchi_csv(const flightplan::FlightPlan& plan);

/// One row per capture point: index, latitude, longitude, altitude_m (AMSL),
/// heading_deg, gimbal_pitch_deg.
std::string export_capture_manifest(const scan::ScanPlan& plan, const geometry::GeoOrigin& origin);

// ---------------------------------------------------------------------------
// Project persistence

std::string save_project(const project::Project& project);
/// Rejects unknown fields and unsupported schema versions with VersionError,
/// dangling references with IntegrityError.
project::Project load_project(std::string_view document);

/// Loads a terrain file referenced by path, relative to `base_dir`.
void resolve_terrain(project::Project& project, const std::filesystem::path& base_dir);

// ---------------------------------------------------------------------------
// Standalone documents written by the CLI

struct ScanPlanDocument {
  geometry::GeoOrigin origin;
  scan::ScanArea area;
  scan::ScanConfig config;
  scan::ScanPlan plan;
};

struct TrajectoryDocument {
  geometry::GeoOrigin origin;
  shot::ShotSpec spec;
  shot::Trajectory trajectory;
};

enum class DocumentKind { project, scan_plan, trajectory, flight_plan, qgc_plan };
DocumentKind detect_document(std::string_view document);

std::string save_scan_plan_document(const ScanPlanDocument& doc);
ScanPlanDocument load_scan_plan_document(std::string_view document);
std::string save_trajectory_document(const TrajectoryDocument& doc);
TrajectoryDocument load_trajectory_document(std::string_view document);
std::string save_flight_plan_document(const flightplan::FlightPlan& plan);
flightplan::FlightPlan load_flight_plan_document(std::string_view document);

// ---------------------------------------------------------------------------
// JSON codecs shared with the service. Readers are strict: unknown keys raise
// VersionError, type mismatches ParseError, each naming the JSON path.

Json to_json(const geometry::EnuPoint& p);
Json to_json(const geometry::GeoOrigin& origin);
Json to_json(const geometry::CameraIntrinsics& camera);
Json to_json(const scan::ScanArea& area);
Json to_json(const scan::ScanConfig& config);
Json to_json(const scan::ScanPlan& plan);
Json to_json(const scan::OverlapReport& report);
Json to_json(const shot::ShotSpec& spec);
Json to_json(const shot::Trajectory& trajectory);
Json to_json(const flightplan::FlightPlan& plan);
Json to_json(const sim::Terrain& terrain);
Json to_json(const sim::Wind& wind);
Json to_json(const sim::DroneLimits& limits);
Json to_json(const sim::SimConfig& config);
Json to_json(const sim::SimEvent& event);
Json to_json(const project::SceneMetadata& scene);
Json to_json(const project::ActorConfig& actor);
Json to_json(const project::DroneConfig& drone);
Json to_json(const project::Project& project);

geometry::EnuPoint enu_from_json(const Json& j, const std::string& path);
geometry::GeoOrigin origin_from_json(const Json& j, const std::string& path);
geometry::CameraIntrinsics camera_from_json(const Json& j, const std::string& path);
scan::ScanArea area_from_json(const Json& j, const std::string& path);
scan::ScanConfig scan_config_from_json(const Json& j, const std::string& path);
scan::ScanPlan scan_plan_from_json(const Json& j, const std::string& path);
shot::ShotSpec shot_spec_from_json(const Json& j, const std::string& path);
shot::Trajectory trajectory_from_json(const Json& j, const std::string& path);
flightplan::FlightPlan flight_plan_from_json(const Json& j, const std::string& path);
sim::Terrain terrain_from_json(const Json& j, const std::string& path);
sim::Wind wind_from_json(const Json& j, const std::string& path);
sim::DroneLimits limits_from_json(const Json& j, const std::string& path);
sim::SimConfig sim_config_from_json(const Json& j, const std::string& path);
project::SceneMetadata scene_from_json(const Json& j, const std::string& path);
project::ActorConfig actor_from_json(const Json& j, const std::string& path);
project::DroneConfig drone_from_json(const Json& j, const std::string& path);
project::Project project_from_json(const Json& j);

/// Parses text into JSON, mapping syntax errors to ParseError.
Json parse_json(std::string_view text);
/// Two-space indented, sorted keys, trailing newline.
std::string dump_json(const Json& j);

}  // namespace dronecine::io
