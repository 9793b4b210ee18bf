#include "dronecine/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dronecine/errors.hpp"
#include "dronecine/flightplan_io.hpp"
#include "dronecine/format.hpp"
#include "dronecine/http_service.hpp"
#include "dronecine/service.hpp"

namespace dronecine::cli {

namespace {

namespace fs = std::filesystem;
using geometry::EnuPoint;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path, "path");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path, "path");
  file << content;
  if (!file.flush()) throw IoError("cannot write " + path, "path");
}

std::string percent(double ratio) { return format_fixed(ratio * 100.0, 2) + "%"; }

// ---------------------------------------------------------------------------
// Shared flag groups

struct OriginFlags {
  geometry::GeoOrigin origin;

  void add(CLI::App* app) {
    app->add_option("--origin-latitude-deg", origin.latitude, "Geodetic origin latitude")->capture_default_str();
    app->add_option("--origin-longitude-deg", origin.longitude, "Geodetic origin longitude")->capture_default_str();
    app->add_option("--origin-altitude-m", origin.altitude, "Origin altitude above mean sea level")
        ->capture_default_str();
  }
};

struct CameraFlags {
  double width = geometry::CameraIntrinsics::reference().sensor_width();
  double height = geometry::CameraIntrinsics::reference().sensor_height();
  double focal = geometry::CameraIntrinsics::reference().focal_length();

  void add(CLI::App* app) {
    app->add_option("--sensor-width-mm", width, "Sensor width")->capture_default_str();
    app->add_option("--sensor-height-mm", height, "Sensor height")->capture_default_str();
    app->add_option("--focal-length-mm", focal, "Lens focal length")->capture_default_str();
  }

  geometry::CameraIntrinsics camera() const { return {width, height, focal}; }
};

std::vector<EnuPoint> parse_path(const std::string& text) {
  std::vector<EnuPoint> out;
  std::stringstream points(text);
  std::string point;
  while (std::getline(points, point, ';')) {
    std::vector<double> v;
    std::stringstream coords(point);
    std::string c;
    while (std::getline(coords, c, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw InvalidArgument("target path coordinates must be numbers", "target_path");
      }
    }
    if (v.size() != 2 && v.size() != 3)
      throw InvalidArgument("target path points are east,north[,up]", "target_path");
    out.push_back({v[0], v[1], v.size() == 3 ? v[2] : 0.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// plan-scan

struct PlanScanCmd {
  scan::ScanArea area;
  scan::ScanConfig config;
  CameraFlags camera;
  OriginFlags origin;
  std::vector<double> gimbal;
  bool single_direction = false;
  std::string out_path;
  std::string manifest_path;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("plan-scan", "Plan a layered photogrammetry scan and write its capture manifest");
    c->add_option("--origin-corner-east-m", area.origin_corner.east, "Area corner east")->capture_default_str();
    c->add_option("--origin-corner-north-m", area.origin_corner.north, "Area corner north")->capture_default_str();
    c->add_option("--length-x-m", area.length_x, "Area side along its x axis")->capture_default_str();
    c->add_option("--length-y-m", area.length_y, "Area side along its y axis")->capture_default_str();
    c->add_option("--rotation-deg", area.rotation_deg, "Area rotation, counter-clockwise from east")
        ->capture_default_str();
    c->add_option("--base-height-m", config.base_height, "Lowest layer height")->capture_default_str();
    c->add_option("--avg-building-height-m", config.avg_building_height, "Average building height")
        ->capture_default_str();
    c->add_option("--max-building-height-m", config.max_building_height, "Tallest building height")
        ->capture_default_str();
    c->add_option("--in-track-overlap", config.in_track_overlap, "Overlap along a leg, [0, 1)")
        ->capture_default_str();
    c->add_option("--cross-track-overlap", config.cross_track_overlap, "Overlap between legs, [0, 1)")
        ->capture_default_str();
    c->add_option("--gimbal-pitch-per-layer-deg", gimbal, "Gimbal pitch per layer, highest layer first")
        ->expected(3);
    c->add_option("--cruise-speed-mps", config.cruise_speed, "Flight speed between captures")
        ->capture_default_str();
    c->add_flag("--single-direction", single_direction, "Fly only the x pass per layer");
    camera.add(c);
    origin.add(c);
    c->add_option("--out", out_path, "Scan plan document to write")->required();
    c->add_option("--manifest", manifest_path, "Capture manifest CSV (default: <out>.manifest.csv)");
    cmd = c;
  }

  int run(std::ostream& out) {
    if (!gimbal.empty()) std::copy(gimbal.begin(), gimbal.end(), config.gimbal_pitch_per_layer.begin());
    config.both_directions = !single_direction;
    config.camera = camera.camera();
    geometry::validate(origin.origin);
    io::ScanPlanDocument doc{origin.origin, area, config, scan::plan_scan(area, config)};
    const std::string manifest = manifest_path.empty() ? out_path + ".manifest.csv" : manifest_path;
    const std::string csv = io::export_capture_manifest(doc.plan, doc.origin);
    write_output(out_path, io::save_scan_plan_document(doc), out);
    write_output(manifest, csv, out);

    out << "layers: " << doc.plan.layers.size() << "\n";
    for (std::size_t i = 0; i < doc.plan.layers.size(); ++i) {
      const auto& layer = doc.plan.layers[i];
      std::size_t captures = 0;
      for (const auto& leg : layer.legs) captures += leg.captures.size();
      out << "layer " << i << ": height " << format_shortest(layer.height) << " m, gimbal pitch "
          << format_shortest(layer.gimbal_pitch) << " deg, legs " << layer.legs.size() << ", captures "
          << captures << "\n";
    }
    out << "total image count: " << doc.plan.total_image_count << "\n";
    return kExitOk;
  }

  CLI::App* cmd = nullptr;
};

// ---------------------------------------------------------------------------
// shot

struct ShotCmd {
  shot::ShotSpec spec;
  std::string type = "orbit";
  EnuPoint target;
  std::string target_path;
  double target_speed = 5.0;
  bool target_loop = false;
  double dt = 0.05;
  double interval = 1.0;
  CameraFlags camera;
  OriginFlags origin;
  std::string out_path;
  std::string flight_plan_path;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("shot", "Generate a cinematic shot trajectory");
    c->add_option("--type", type, "ESTABLISH, CHASE, FLYBY, ELEVATOR or ORBIT")->capture_default_str();
    c->add_option("--target-east-m", target.east, "Static target east")->capture_default_str();
    c->add_option("--target-north-m", target.north, "Static target north")->capture_default_str();
    c->add_option("--target-up-m", target.up, "Static target up")->capture_default_str();
    c->add_option("--target-path", target_path, "Moving target path as e,n[,u];e,n[,u];...");
    c->add_option("--target-speed-mps", target_speed, "Speed of the moving target")->capture_default_str();
    c->add_flag("--target-loop", target_loop, "Moving target loops its path");
    c->add_option("--height-m", spec.height, "Flight height above the target")->capture_default_str();
    c->add_option("--speed-mps", spec.speed, "Drone speed")->capture_default_str();
    c->add_option("--orbit-radius-m,--radius", spec.orbit_radius, "ORBIT radius")->capture_default_str();
    c->add_option("--orbit-start-angle-deg", spec.orbit_start_angle_deg, "ORBIT start, counter-clockwise from east")
        ->capture_default_str();
    c->add_option("--orbit-arc-deg", spec.orbit_arc_deg, "ORBIT swept angle, signed")->capture_default_str();
    c->add_option("--chase-distance-m", spec.chase_distance, "CHASE trailing distance")->capture_default_str();
    c->add_option("--chase-duration-s", spec.chase_duration_s, "CHASE duration")->capture_default_str();
    c->add_option("--flyby-offset-m", spec.flyby_offset, "FLYBY lateral offset")->capture_default_str();
    c->add_option("--flyby-length-m", spec.flyby_length, "FLYBY pass length")->capture_default_str();
    c->add_option("--establish-start-distance-m", spec.establish_start_distance, "ESTABLISH start distance")
        ->capture_default_str();
    c->add_option("--establish-end-distance-m", spec.establish_end_distance, "ESTABLISH end distance")
        ->capture_default_str();
    c->add_option("--establish-end-height-m", spec.establish_end_height, "ESTABLISH end height")
        ->capture_default_str();
    c->add_option("--elevator-distance-m", spec.elevator_distance, "ELEVATOR horizontal distance")
        ->capture_default_str();
    c->add_option("--elevator-start-height-m", spec.elevator_start_height, "ELEVATOR start height")
        ->capture_default_str();
    c->add_option("--elevator-end-height-m", spec.elevator_end_height, "ELEVATOR end height")
        ->capture_default_str();
    c->add_option("--bearing-deg", spec.bearing_deg, "Travel or anchor bearing, clockwise from north")
        ->capture_default_str();
    c->add_option("--dt-s", dt, "Sample interval")->capture_default_str();
    c->add_option("--waypoint-interval-s", interval, "Waypoint spacing of the flight plan")->capture_default_str();
    camera.add(c);
    origin.add(c);
    c->add_option("--out", out_path, "Trajectory document to write")->required();
    c->add_option("--flight-plan", flight_plan_path, "Flight plan document to write");
    cmd = c;
  }

  int run(std::ostream& out) {
    spec.type = shot::parse_shot_type(type);
    spec.target = target;
    spec.camera = camera.camera();
    geometry::validate(origin.origin);
    shot::Trajectory trajectory;
    if (!target_path.empty()) {
      const sim::Actor actor = sim::make_actor(1, sim::ActorKind::car, parse_path(target_path), target_speed,
                                               target_loop);
      spec.target = actor.path.front();
      trajectory = shot::generate_shot(
          spec, [actor](double t) { return sim::actor_position_at(actor, t); }, dt);
    } else {
      trajectory = shot::generate_shot(spec, dt);
    }
    const io::TrajectoryDocument doc{origin.origin, spec, trajectory};
    std::string plan_text;
    if (!flight_plan_path.empty())
      plan_text = io::save_flight_plan_document(
          flightplan::trajectory_to_flight_plan(trajectory, origin.origin, interval));
    write_output(out_path, io::save_trajectory_document(doc), out);
    if (!flight_plan_path.empty()) write_output(flight_plan_path, plan_text, out);
    out << "shot: " << shot::to_string(spec.type) << "\n"
        << "duration_s: " << format_shortest(trajectory.duration()) << "\n"
        << "samples: " << trajectory.samples.size() << "\n";
    return kExitOk;
  }

  CLI::App* cmd = nullptr;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateCmd {
  std::string project_path;
  std::string trajectory_path;
  std::string inputs_path;
  std::string trace_path;
  std::string events_path;
  double duration = 10.0;
  int manual_drone = 0;
  EnuPoint wind_mean;
  double gust_amplitude = 0.0;
  double gust_period = 10.0;
  std::int64_t seed = 0;
  EnuPoint landmark;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate", "Run the simulator headless and write trace and events");
    c->add_option("--project", project_path, "Project document");
    c->add_option("--trajectory", trajectory_path, "Trajectory document flown by an added drone");
    c->add_option("--duration-s", duration, "Simulated time")->capture_default_str();
    c->add_option("--manual-drone", manual_drone, "Drone id flown from the input log");
    c->add_option("--inputs", inputs_path, "Input log CSV (tick,drone_id,forward,right,climb,yaw_rate,gimbal_rate)");
    wind_opts[0] = c->add_option("--wind-east-mps", wind_mean.east, "Mean wind east");
    wind_opts[1] = c->add_option("--wind-north-mps", wind_mean.north, "Mean wind north");
    wind_opts[2] = c->add_option("--gust-amplitude-mps", gust_amplitude, "Gust amplitude");
    wind_opts[3] = c->add_option("--gust-period-s", gust_period, "Gust period");
    wind_opts[4] = c->add_option("--seed", seed, "Gust phase seed");
    landmark_opts[0] = c->add_option("--landmark-east-m", landmark.east, "Coverage landmark east");
    landmark_opts[1] = c->add_option("--landmark-north-m", landmark.north, "Coverage landmark north");
    landmark_opts[2] = c->add_option("--landmark-up-m", landmark.up, "Coverage landmark up");
    c->add_option("--trace", trace_path, "Trace CSV to write");
    c->add_option("--events", events_path, "Events CSV to write");
    cmd = c;
  }

  int run(std::ostream& out) {
    project::Project p;
    if (!project_path.empty()) {
      p = io::load_project(read_file(project_path));
      io::resolve_terrain(p, fs::path(project_path).parent_path());
    }
    std::optional<EnuPoint> default_landmark;
    if (!trajectory_path.empty()) {
      const io::TrajectoryDocument doc = io::load_trajectory_document(read_file(trajectory_path));
      if (project_path.empty()) p.origin = doc.origin;
      project::ShotEntry entry{project::next_id(p.shots), doc.spec, doc.trajectory.dt, doc.trajectory};
      if (std::holds_alternative<shot::ActorId>(entry.spec.target))
        throw InvalidArgument("standalone trajectories must target a point", "spec.target");
      default_landmark = std::get<EnuPoint>(entry.spec.target);
      project::DroneConfig drone;
      drone.id = project::next_id(p.drones);
      const auto& first = doc.trajectory.samples.front().pose;
      drone.position = first.position;
      drone.yaw = first.yaw;
      drone.gimbal_pitch = first.gimbal_pitch;
      drone.camera = doc.spec.camera;
      drone.assignment = project::Assignment::shot;
      drone.assignment_id = entry.id;
      p.shots.push_back(std::move(entry));
      p.drones.push_back(drone);
    }
    if (std::any_of(wind_opts.begin(), wind_opts.end(), [](CLI::Option* o) { return o->count() > 0; })) {
      if (!wind_opts[0]->count()) wind_mean.east = p.wind.mean.east;
      if (!wind_opts[1]->count()) wind_mean.north = p.wind.mean.north;
      if (!wind_opts[2]->count()) gust_amplitude = p.wind.gust_amplitude;
      if (!wind_opts[3]->count()) gust_period = p.wind.gust_period;
      if (!wind_opts[4]->count()) seed = p.wind.phase_seed;
      p.wind = {wind_mean, gust_amplitude, gust_period, seed};
    }
    if (landmark_opts[0]->count() || landmark_opts[1]->count() || landmark_opts[2]->count())
      default_landmark = landmark;
    if (!(duration > 0.0) || !std::isfinite(duration))
      throw InvalidArgument("duration must be positive", "duration_s");

    std::vector<sim::ControlRecord> inputs;
    if (!inputs_path.empty()) inputs = sim::parse_input_log(read_file(inputs_path));
    project::WorldOptions options;
    options.record_all = true;
    if (manual_drone != 0) options.manual_drone = manual_drone;
    sim::World world = project::build_world(p, options);
    const auto ticks = static_cast<std::uint64_t>(std::llround(duration / world.config.tick));
    const sim::SimRun run = sim::run_headless(std::move(world), ticks, inputs);

    if (!trace_path.empty()) write_output(trace_path, sim::trace_to_csv(run.trace), out);
    if (!events_path.empty()) write_output(events_path, sim::events_to_csv(run.events), out);

    std::map<std::string, std::size_t> counts;
    for (const auto& e : run.events) ++counts[std::string(sim::to_string(e.kind))];
    out << "ticks: " << ticks << "\n"
        << "time_s: " << format_shortest(run.final_world.time()) << "\n"
        << "events: " << run.events.size() << "\n";
    for (const auto& [kind, n] : counts) out << "  " << kind << ": " << n << "\n";
    for (const auto& d : run.final_world.drones) {
      const auto pose = sim::drone_pose(d);
      out << "drone " << d.id << " final position: " << format_fixed(pose.position.east, 3) << " "
          << format_fixed(pose.position.north, 3) << " " << format_fixed(pose.position.up, 3) << "\n";
      if (default_landmark) {
        const auto& rec = run.final_world.recordings.at(d.id);
        out << "drone " << d.id << " coverage: "
            << format_shortest(sim::landmark_coverage(rec, d.camera, *default_landmark)) << "\n";
      }
    }
    return kExitOk;
  }

  std::array<CLI::Option*, 5> wind_opts{};
  std::array<CLI::Option*, 3> landmark_opts{};
  CLI::App* cmd = nullptr;
};

// ---------------------------------------------------------------------------
// verify-overlap

struct VerifyOverlapCmd {
  std::string plan_path;
  std::string mode = "landscape";
  bool strict = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify-overlap", "Report achieved image overlap of a scan plan");
    c->add_option("--plan", plan_path, "Scan plan document")->required();
    c->add_option("--mode", mode, "landscape (70%) or detail (80%)")->capture_default_str();
    c->add_flag("--strict", strict, "Exit 1 when any warning fires");
    cmd = c;
  }

  int run(std::ostream& out) {
    const auto quality = service::parse_quality_mode(mode);
    const io::ScanPlanDocument doc = io::load_scan_plan_document(read_file(plan_path));
    const scan::OverlapReport report = scan::verify_overlap(doc.plan, doc.config.camera, quality);
    out << "mode: " << mode << " (threshold " << percent(report.threshold) << ")\n";
    for (std::size_t i = 0; i < report.layers.size(); ++i) {
      const auto& l = report.layers[i];
      out << "layer " << i << " (height " << format_shortest(l.height) << " m): in-track min "
          << percent(l.min_in_track) << " max " << percent(l.max_in_track);
      if (l.min_cross_track)
        out << ", cross-track min " << percent(*l.min_cross_track) << " max " << percent(*l.max_cross_track);
      else
        out << ", cross-track n/a (single leg)";
      out << "\n";
    }
    out << "minimum in-track overlap: " << percent(report.min_in_track) << "\n";
    if (report.min_cross_track) out << "minimum cross-track overlap: " << percent(*report.min_cross_track) << "\n";
    for (const auto& w : report.warnings) {
      out << "WARNING: layer " << w.layer << " "
          << (w.axis == scan::OverlapAxis::in_track ? "in-track" : "cross-track") << " overlap "
          << percent(w.achieved) << " is below the " << percent(w.threshold) << " " << mode
          << " threshold\n";
    }
    out << (report.warnings.empty() ? "overlap OK\n" : std::to_string(report.warnings.size()) + " warning(s)\n");
    return strict && !report.warnings.empty() ? kExitValidation : kExitOk;
  }

  CLI::App* cmd = nullptr;
};

// ---------------------------------------------------------------------------
// export

struct ExportCmd {
  std::string in_path;
  std::string format;
  std::string out_path = "-";
  std::string source;
  int id = 0;
  double interval = 1.0;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("export", "Convert plan files between formats");
    c->add_option("--in", in_path, "Scan plan, trajectory, flight plan, QGC plan or project document")->required();
    c->add_option("--format", format, "qgc, litchi, json or manifest")
        ->required()
        ->check(CLI::IsMember({"qgc", "litchi", "json", "manifest"}));
    c->add_option("--out", out_path, "Output file, - for standard output")->capture_default_str();
    c->add_option("--source", source, "Project inputs: shot, scan_plan or recording");
    c->add_option("--id", id, "Project inputs: id of the source");
    c->add_option("--waypoint-interval-s", interval, "Waypoint spacing for trajectories")->capture_default_str();
    cmd = c;
  }

  int run(std::ostream& out) {
    const std::string text = read_file(in_path);
    const auto kind = io::detect_document(text);
    flightplan::FlightPlan plan;
    switch (kind) {
      case io::DocumentKind::project: {
        project::Project p = io::load_project(text);
        io::resolve_terrain(p, fs::path(in_path).parent_path());
        service::Session session("cli", std::move(p));
        write_output(out_path, session.export_plan(source, id, format).body, out);
        return kExitOk;
      }
      case io::DocumentKind::scan_plan: {
        const auto doc = io::load_scan_plan_document(text);
        if (format == "manifest") {
          write_output(out_path, io::export_capture_manifest(doc.plan, doc.origin), out);
          return kExitOk;
        }
        plan = flightplan::scan_plan_to_flight_plan(doc.plan, doc.origin, doc.config.cruise_speed);
        break;
      }
      case io::DocumentKind::trajectory: {
        const auto doc = io::load_trajectory_document(text);
        plan = flightplan::trajectory_to_flight_plan(doc.trajectory, doc.origin, interval);
        break;
      }
      case io::DocumentKind::flight_plan:
        plan = io::load_flight_plan_document(text);
        break;
      case io::DocumentKind::qgc_plan:
        plan = io::import_qgc_plan(text);
        break;
    }
    if (format == "manifest") throw InvalidArgument("manifest export needs a scan plan input", "format");
    const std::string body = format == "qgc"      ? io::export_qgc_plan(plan)
                             : format == "litchi" ? io::export_litchi_csv(plan)
                                                  : io::save_flight_plan_document(plan);
    write_output(out_path, body, out);
    return kExitOk;
  }

  CLI::App* cmd = nullptr;
};

// ---------------------------------------------------------------------------
// serve

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  bool allow_shutdown = false;
  bool manual_clock = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("serve", "Start the HTTP service");
    c->add_option("--host", host, "Bind address")->capture_default_str();
    c->add_option("--port", port, "Port, 0 picks a free one")->capture_default_str()->check(CLI::Range(0, 65535));
    c->add_flag("--allow-shutdown", allow_shutdown, "Enable POST /v1/shutdown");
    c->add_flag("--manual-clock", manual_clock, "Advance simulations only through /sim/advance");
    cmd = c;
  }

  int run(std::ostream& out) {
    service::HttpService http({!manual_clock, allow_shutdown});
    const int bound = http.bind(host, port);
    out << "listening on http://" << host << ":" << bound << std::endl;
    http.run();
    return kExitOk;
  }

  CLI::App* cmd = nullptr;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Drone cinematography and photogrammetry mission planner", "dronecine"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  PlanScanCmd plan_scan;
  ShotCmd shot_cmd;
  SimulateCmd simulate;
  VerifyOverlapCmd verify;
  ExportCmd export_cmd;
  ServeCmd serve;
  plan_scan.add(app);
  shot_cmd.add(app);
  simulate.add(app);
  verify.add(app);
  export_cmd.add(app);
  serve.add(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (plan_scan.cmd->parsed()) return plan_scan.run(out);
    if (shot_cmd.cmd->parsed()) return shot_cmd.run(out);
    if (simulate.cmd->parsed()) return simulate.run(out);
    if (verify.cmd->parsed()) return verify.run(out);
    if (export_cmd.cmd->parsed()) return export_cmd.run(out);
    if (serve.cmd->parsed()) return serve.run(out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << ")";
    if (!e.field().empty()) err << " in " << e.field();
    err << ": " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace dronecine::cli
