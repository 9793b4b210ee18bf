// Acceptance runner: one PASS/FAIL line per primary criterion, each with its
// tolerance and runtime limit. Exits non-zero when any criterion fails.

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "dronecine/cli.hpp"
#include "dronecine/errors.hpp"
#include "dronecine/flightplan_io.hpp"
#include "dronecine/scan_planner.hpp"
#include "dronecine/shot_grammar.hpp"
#include "dronecine/sim_engine.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace dronecine;
using geometry::EnuPoint;
namespace fs = std::filesystem;

namespace {

// Collects the first few failures of a criterion.
struct Check {
  int failures = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double horizontal(const EnuPoint& a, const EnuPoint& b) { return std::hypot(a.east - b.east, a.north - b.north); }

// --- footprint and working-distance rescale -------------------------------

void footprint_suite(Check& c) {
  const auto ref_cam = geometry::CameraIntrinsics::reference();
  const geometry::ReferenceSetup ref;
  c.expect(ref_cam.sensor_width() == 23.66 && ref_cam.sensor_height() == 13.3 && ref_cam.focal_length() == 35.0,
           "reference camera constants");
  c.expect(ref.working_distance() == 20.0, "reference working distance");
  const auto fp = geometry::ground_footprint(ref_cam, 20.0);
  c.expect(fp.cross_track_extent == 13.52 && fp.in_track_extent == 7.6,
           "reference footprint " + num(fp.cross_track_extent) + " x " + num(fp.in_track_extent));

  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> w(5, 45), ratio(0.3, 1.0), f(4, 300), d(0.5, 800), s(0.01, 50);
  for (int i = 0; i < 1000; ++i) {
    const double sw = w(rng);
    const geometry::CameraIntrinsics cam(sw, sw * ratio(rng), f(rng));
    const double wd = d(rng), k = s(rng);
    const auto a = geometry::ground_footprint(cam, wd);
    const auto b = geometry::ground_footprint(cam, k * wd);
    // Linearity in working distance and agreement with the angular form.
    c.expect(std::abs(b.cross_track_extent - k * a.cross_track_extent) <= 1e-12 * b.cross_track_extent,
             "cross-track linearity, camera " + std::to_string(i));
    c.expect(std::abs(b.in_track_extent - k * a.in_track_extent) <= 1e-12 * b.in_track_extent,
             "in-track linearity, camera " + std::to_string(i));
    c.expect(std::abs(a.cross_track_extent - oracle::coverage_from_fov(cam.sensor_width(), cam.focal_length(), wd)) <=
                 1e-12 * a.cross_track_extent,
             "footprint vs field of view, camera " + std::to_string(i));
    // The rescaled working distance reproduces the reference footprint.
    const double wd_cross = geometry::scale_working_distance(ref, cam, geometry::FootprintAxis::cross_track);
    const double wd_in = geometry::scale_working_distance(ref, cam, geometry::FootprintAxis::in_track);
    c.expect(std::abs(geometry::ground_footprint(cam, wd_cross).cross_track_extent - 13.52) <= 1e-9,
             "cross-track invariance, camera " + std::to_string(i));
    c.expect(std::abs(geometry::ground_footprint(cam, wd_in).in_track_extent - 7.6) <= 1e-9,
             "in-track invariance, camera " + std::to_string(i));
  }
}

// --- layer heights and gimbal defaults ------------------------------------

void layer_suite(Check& c) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> h(1, 150), b(0, 80);
  for (int i = 0; i < 100; ++i) {
    scan::ScanConfig cfg;
    cfg.base_height = h(rng);
    cfg.avg_building_height = b(rng);
    cfg.max_building_height = cfg.avg_building_height + b(rng);
    const auto l = scan::layer_heights(cfg);
    c.expect(l[0] == cfg.base_height && l[1] == cfg.base_height + cfg.avg_building_height &&
                 l[2] == cfg.base_height + cfg.max_building_height,
             "layer heights, config " + std::to_string(i));
  }
  scan::ScanConfig cfg;
  cfg.avg_building_height = 7;
  cfg.max_building_height = 18;
  const auto plan = scan::plan_scan({}, cfg);
  const bool ordered = plan.layers.size() == 3 && plan.layers[0].height < plan.layers[1].height &&
                       plan.layers[1].height < plan.layers[2].height;
  c.expect(ordered, "layers ordered by height");
  if (ordered)
    c.expect(plan.layers[0].gimbal_pitch == 35 && plan.layers[1].gimbal_pitch == 60 && plan.layers[2].gimbal_pitch == 85,
             "gimbal 35/60/85 from lowest to highest");
}

// --- overlap guarantee ---------------------------------------------------

void overlap_suite(Check& c) {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> len(3, 250), h(8, 90), ov(0.0, 0.92), rot(-180, 180), bld(0, 25);
  std::size_t warned = 0, clean = 0;
  for (int i = 0; i < 200; ++i) {
    scan::ScanArea area;
    area.origin_corner = {rot(rng), rot(rng), 0};
    area.length_x = len(rng);
    area.length_y = len(rng);
    area.rotation_deg = rot(rng);
    scan::ScanConfig cfg;
    cfg.base_height = h(rng);
    cfg.avg_building_height = bld(rng);
    cfg.max_building_height = cfg.avg_building_height + bld(rng);
    cfg.in_track_overlap = ov(rng);
    cfg.cross_track_overlap = ov(rng);
    cfg.both_directions = i % 4 != 0;
    const auto plan = scan::plan_scan(area, cfg);
    const std::string tag = "case " + std::to_string(i);
    for (auto mode : {scan::QualityMode::landscape, scan::QualityMode::detail}) {
      const auto rep = scan::verify_overlap(plan, cfg.camera, mode);
      const double thr = mode == scan::QualityMode::landscape ? 0.70 : 0.80;
      c.expect(rep.threshold == thr, tag + " threshold");
      c.expect(rep.min_in_track >= cfg.in_track_overlap - 1e-6, tag + " in-track " + num(rep.min_in_track));
      c.expect(rep.min_cross_track && *rep.min_cross_track >= cfg.cross_track_overlap - 1e-6,
               tag + " cross-track minimum");
      // Warnings fire exactly for the layers and axes that fall below.
      std::size_t expected = 0;
      for (std::size_t k = 0; k < rep.layers.size(); ++k) {
        const auto& l = rep.layers[k];
        expected += l.min_in_track < thr;
        expected += l.min_cross_track && *l.min_cross_track < thr;
      }
      c.expect(rep.warnings.size() == expected, tag + " warning count");
      (rep.warnings.empty() ? clean : warned) += 1;
      for (const auto& w : rep.warnings) c.expect(w.achieved < thr && w.threshold == thr, tag + " warning value");
    }
  }
  c.expect(warned > 0 && clean > 0, "both warning outcomes exercised");
}

// --- grid counts ----------------------------------------------------------

void grid_suite(Check& c) {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> len(2, 400), h(4, 150), ov(0.0, 0.95), bld(0, 40);
  for (int i = 0; i < 200; ++i) {
    scan::ScanArea area;
    area.length_x = len(rng);
    area.length_y = len(rng);
    scan::ScanConfig cfg;
    cfg.base_height = h(rng);
    cfg.avg_building_height = bld(rng);
    cfg.max_building_height = cfg.avg_building_height + bld(rng);
    cfg.in_track_overlap = ov(rng);
    cfg.cross_track_overlap = ov(rng);
    cfg.both_directions = i % 2 == 0;
    const auto plan = scan::plan_scan(area, cfg);
    const auto hs = scan::layer_heights(cfg);
    const auto expected = oracle::closed_form_count(area.length_x, area.length_y, {hs.begin(), hs.end()}, 23.66, 13.3,
                                                    35.0, cfg.in_track_overlap, cfg.cross_track_overlap,
                                                    cfg.both_directions);
    c.expect(scan::estimate_image_count(plan) == expected && plan.total_image_count == expected,
             "closed form count, case " + std::to_string(i));
  }
  const auto plan = scan::plan_scan({}, {});
  for (std::size_t k = 0; k < plan.layers.size(); ++k) {
    std::size_t x = 0, y = 0;
    for (const auto& leg : plan.layers[k].legs) (leg.direction == scan::GridDirection::x ? x : y) += leg.captures.size();
    c.expect(x == 476 && y == 476, "layer " + std::to_string(k) + ": " + std::to_string(x) + "/" + std::to_string(y));
  }
}

// --- shot invariants ----------------------------------------------------

void shot_suite(Check& c) {
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> u01(0, 1);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  for (int i = 0; i < 50; ++i) {
    const EnuPoint target{in(-500, 500), in(-500, 500), in(0, 30)};
    shot::ShotSpec s;
    s.target = target;
    s.height = in(5, 60);
    s.speed = in(1, 15);

    s.type = shot::ShotType::orbit;
    s.orbit_radius = in(5, 200);
    s.orbit_arc_deg = in(-720, 720);
    for (const auto& smp : shot::generate_shot(s, 0.05).samples)
      c.expect(std::abs(horizontal(smp.pose.position, target) - s.orbit_radius) <= 1e-9 * s.orbit_radius,
               "orbit radius, case " + std::to_string(i));

    s.type = shot::ShotType::elevator;
    s.bearing_deg = in(0, 360);
    s.elevator_start_height = in(1, 20);
    s.elevator_end_height = in(25, 90);
    const auto el = shot::generate_shot(s, 0.05);
    for (const auto& smp : el.samples)
      c.expect(std::abs(smp.pose.position.east - el.samples[0].pose.position.east) <= 1e-12 &&
                   std::abs(smp.pose.position.north - el.samples[0].pose.position.north) <= 1e-12,
               "elevator fixity, case " + std::to_string(i));

    s.type = shot::ShotType::flyby;
    s.flyby_offset = in(2, 80);
    s.flyby_length = in(20, 400);
    const auto fb = shot::generate_shot(s, 0.05);
    const auto& a = fb.samples.front().pose.position;
    const auto& b = fb.samples.back().pose.position;
    const double dmin = oracle::point_segment_distance(target.east, target.north, a.east, a.north, b.east, b.north);
    c.expect(std::abs(dmin - s.flyby_offset) <= 1e-9, "flyby offset, case " + std::to_string(i));

    s.type = shot::ShotType::chase;
    s.chase_distance = in(3, 30);
    s.chase_duration_s = 10;
    s.speed = 12;
    const double tv = in(1, 8);
    const EnuPoint dir = geometry::heading_vector(in(0, 360));
    const auto path = [&](double t) { return target + (tv * t) * dir; };
    for (const auto& smp : shot::generate_shot(s, path, 0.05).samples) {
      if (smp.time < 5.0) continue;
      const EnuPoint want = path(smp.time) - s.chase_distance * dir + EnuPoint{0, 0, s.height};
      c.expect(geometry::distance(smp.pose.position, want) <= 1e-6, "chase steady state, case " + std::to_string(i));
    }

    // Angular size under a different camera after rescaling.
    shot::ShotSpec o;
    o.target = target;
    o.orbit_radius = in(10, 80);
    o.height = in(5, 50);
    const double w = in(12, 40);
    const auto base = shot::generate_shot(o, 0.1);
    o.camera = geometry::CameraIntrinsics(w, w * in(0.4, 1.0), in(8, 120));
    const auto scaled = shot::generate_shot(shot::rescale_shot_params(o, geometry::ReferenceSetup{}), 0.1);
    const double object = 3.0;
    for (std::size_t k = 0; k < std::min(base.samples.size(), scaled.samples.size()); k += 11) {
      const double f0 = object * 35.0 / (geometry::distance(base.samples[k].pose.position, target) * 23.66);
      const double f1 = object * o.camera.focal_length() /
                        (geometry::distance(scaled.samples[k].pose.position, target) * o.camera.sensor_width());
      c.expect(std::abs(f1 - f0) <= 1e-9 * f0, "angular size, case " + std::to_string(i));
    }
  }
}

// --- simulator determinism ----------------------------------------------

void determinism_suite(Check& c) {
  const auto inputs = scenario::scripted_inputs(1200);
  const auto a = sim::run_headless(scenario::determinism_world(), 1200, inputs);
  const auto b = sim::run_headless(scenario::determinism_world(), 1200, inputs);
  c.expect(a.final_world.drones.size() == 2 && a.final_world.actors.size() == 3, "scenario shape");
  c.expect(a.final_world.wind.gust_amplitude > 0, "wind on");
  c.expect(a.trace.size() == b.trace.size(), "trace length");
  c.expect(sim::trace_to_csv(a.trace) == sim::trace_to_csv(b.trace), "trace CSV bytes");
  c.expect(a.events == b.events && sim::events_to_csv(a.events) == sim::events_to_csv(b.events), "event lists");
  for (std::size_t i = 0; i < std::min(a.trace.size(), b.trace.size()); ++i) {
    const auto& x = a.trace[i];
    const auto& y = b.trace[i];
    c.expect(std::memcmp(&x.pose, &y.pose, sizeof x.pose) == 0 &&
                 std::memcmp(&x.velocity, &y.velocity, sizeof x.velocity) == 0,
             "trace row " + std::to_string(i) + " bits");
  }
}

// --- landmark coverage --------------------------------------------------

void coverage_suite(Check& c) {
  const auto cam = geometry::CameraIntrinsics::reference();
  shot::ShotSpec orbit;
  orbit.target = EnuPoint{12, -4, 3};
  const auto t = shot::generate_shot(orbit, 0.05);
  c.expect(sim::landmark_coverage(t, cam, {12, -4, 3}) == 1.0, "orbit coverage");

  // The same orbit flown through the simulator.
  sim::World w;
  auto traj = std::make_shared<const shot::Trajectory>(t);
  sim::Drone d = sim::make_drone(1, sim::FollowTrajectory{traj}, {}, {});
  d.recording = true;
  w.drones.push_back(d);
  sim::begin_recordings(w);
  for (std::size_t k = 0; k + 1 < t.samples.size(); ++k) sim::advance(w, 0.05);
  c.expect(sim::landmark_coverage(w.recordings.at(1), cam, {12, -4, 3}) == 1.0, "simulated orbit coverage");

  shot::ShotSpec el;
  el.type = shot::ShotType::elevator;
  el.bearing_deg = 0;
  c.expect(sim::landmark_coverage(shot::generate_shot(el, 0.05), cam, {0, 60, 0}) == 0.0, "behind-camera coverage");

  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> off(8, 35), brg(0, 360), pitch(-2, 9);
  int compared = 0;
  for (int i = 0; i < 30; ++i) {
    shot::ShotSpec fb;
    fb.type = shot::ShotType::flyby;
    fb.flyby_offset = off(rng);
    fb.flyby_length = 220;
    fb.height = 10;
    fb.bearing_deg = brg(rng);
    auto ft = shot::generate_shot(fb, 0.05);
    const double p = pitch(rng);
    for (auto& s : ft.samples) s.pose = geometry::make_pose(s.pose.position, fb.bearing_deg, p);
    std::size_t seen = 0;
    double margin = 1.0;
    for (const auto& s : ft.samples) {
      double m = 0;
      seen += oracle::in_frustum(s.pose, cam.sensor_width(), cam.sensor_height(), cam.focal_length(), {}, &m);
      margin = std::min(margin, std::abs(m));
    }
    if (margin <= 1e-9) continue;  // a frame exactly on the border has no exact oracle
    ++compared;
    const double ratio = sim::landmark_coverage(ft, cam, {});
    c.expect(ratio == static_cast<double>(seen) / static_cast<double>(ft.samples.size()),
             "flyby brute-force count, case " + std::to_string(i));
    c.expect(ratio > 0.0 && ratio < 1.0, "flyby ratio strictly inside (0, 1), case " + std::to_string(i));
  }
}

// --- I/O ------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void io_suite(Check& c) {
  gen::Rng rng(131);
  for (int i = 0; i < 200; ++i) {
    const auto plan = gen::flight_plan(rng);
    const std::string text = io::export_qgc_plan(plan);
    const auto back = io::import_qgc_plan(text);
    bool same = back.origin == plan.origin && back.waypoints.size() == plan.waypoints.size();
    for (std::size_t k = 0; same && k < plan.waypoints.size(); ++k) {
      const auto& x = plan.waypoints[k];
      const auto& y = back.waypoints[k];
      same = geometry::distance(x.position, y.position) <= 1e-6 && x.position.up == y.position.up &&
             x.speed == y.speed && x.heading == y.heading && x.gimbal_pitch == y.gimbal_pitch &&
             x.capture == y.capture;
    }
    c.expect(same, "QGC round trip, plan " + std::to_string(i));
    c.expect(io::export_qgc_plan(plan) == text, "QGC bytes, plan " + std::to_string(i));
    c.expect(io::export_litchi_csv(plan) == io::export_litchi_csv(plan), "Litchi bytes, plan " + std::to_string(i));
  }
  for (int i = 0; i < 200; ++i) {
    const auto p = gen::project(rng);
    const std::string text = io::save_project(p);
    const auto back = io::load_project(text);
    c.expect(back == p, "project round trip, project " + std::to_string(i));
    c.expect(io::save_project(back) == text, "project bytes, project " + std::to_string(i));
  }
  flightplan::FlightPlan golden_plan;
  golden_plan.origin = {47.3977, 8.5456, 488.0};
  golden_plan.waypoints = {{{0, 0, 30}, 5, 0, 0, false},
                           {{100, 50, 35}, 5, 63.4349, 30, true},
                           {{-25.5, 200.25, 40}, 7.5, 270, 90, true},
                           {{1000, -1000, 12.345}, 7.5, 359.99, -15, false}};
  const std::string golden = slurp(fs::path(DRONECINE_TEST_DATA) / "golden" / "litchi_mission.csv");
  c.expect(!golden.empty() && io::export_litchi_csv(golden_plan) == golden, "Litchi golden file");
}

// --- CLI ------------------------------------------------------------------

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str()};
}

void cli_suite(Check& c) {
  const fs::path fx = fs::path(DRONECINE_TEST_DATA) / "fixtures";
  const fs::path tmp = fs::temp_directory_path() / "dronecine_acceptance_cli";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  auto t = [&](const std::string& f) { return (tmp / f).string(); };

  for (const char* tag : {"a", "b"}) {
    const std::string s(tag);
    c.expect(cli_run({"plan-scan", "--out", t(s + ".scan.json")}).code == cli::kExitOk, "plan-scan");
    c.expect(cli_run({"shot", "--type", "ORBIT", "--out", t(s + ".shot.json"), "--flight-plan", t(s + ".fp.json")}).code ==
                 cli::kExitOk,
             "shot");
    c.expect(cli_run({"simulate", "--project", (fx / "project.json").string(), "--inputs", (fx / "inputs.csv").string(),
                      "--manual-drone", "1", "--duration-s", "60", "--trace", t(s + ".trace.csv"), "--events",
                      t(s + ".events.csv")})
                     .code == cli::kExitOk,
             "simulate");
    c.expect(cli_run({"verify-overlap", "--plan", t(s + ".scan.json")}).code == cli::kExitOk, "verify-overlap");
    c.expect(cli_run({"export", "--in", t(s + ".scan.json"), "--format", "qgc", "--out", t(s + ".plan")}).code ==
                 cli::kExitOk,
             "export qgc");
    c.expect(cli_run({"export", "--in", t(s + ".shot.json"), "--format", "litchi", "--out", t(s + ".csv")}).code ==
                 cli::kExitOk,
             "export litchi");
    c.expect(cli_run({"export", "--in", (fx / "project.json").string(), "--format", "json", "--source", "scan_plan",
                      "--id", "1", "--out", t(s + ".project-export.json")})
                     .code == cli::kExitOk,
             "export project");
  }
  for (const char* f : {".scan.json", ".scan.json.manifest.csv", ".shot.json", ".fp.json", ".trace.csv", ".events.csv",
                         ".plan", ".csv", ".project-export.json"}) {
    const std::string a = slurp(t(std::string("a") + f)), b = slurp(t(std::string("b") + f));
    c.expect(!a.empty() && a == b, std::string("deterministic ") + f);
  }

  c.expect(cli_run({"--help"}).code == cli::kExitOk, "--help exits 0");
  c.expect(cli_run({"plan-scan"}).code == cli::kExitValidation, "missing required flag exits 1");
  c.expect(cli_run({"plan-scan", "--out", t("x.json"), "--cross-track-overlap", "1.5"}).code == cli::kExitValidation,
           "invalid overlap exits 1");
  c.expect(cli_run({"verify-overlap", "--plan", t("absent.json")}).code == cli::kExitIo, "missing file exits 2");
  c.expect(cli_run({"verify-overlap", "--plan", t("a.scan.json"), "--mode", "detail", "--strict"}).code ==
               cli::kExitValidation,
           "strict warnings exit 1");

  // serve, end to end through the installed binary.
  FILE* pipe = popen((std::string(DRONECINE_CLI_PATH) + " serve --port 0 --allow-shutdown --manual-clock").c_str(), "r");
  char line[256] = {};
  bool served = false;
  if (pipe && std::fgets(line, sizeof line, pipe)) {
    const std::string first(line);
    const auto colon = first.rfind(':');
    if (colon != std::string::npos) {
      httplib::Client client("127.0.0.1", std::stoi(first.substr(colon + 1)));
      client.set_read_timeout(5, 0);
      const auto h = client.Get("/v1/health");
      const auto s = client.Post("/v1/shutdown", "", "application/json");
      served = h && h->status == 200 && s && s->status == 200;
    }
  }
  const int status = pipe ? pclose(pipe) : -1;
  c.expect(served && WIFEXITED(status) && WEXITSTATUS(status) == 0, "serve answers and shuts down cleanly");
  fs::remove_all(tmp);
}

struct Criterion {
  const char* name;
  const char* tolerance;
  double limit_s;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"footprint and working-distance rescale", "linearity 1e-12 rel, invariance 1e-9 m, constants exact", 1.0,
       footprint_suite},
      {"layer heights and default gimbal", "exact", 1.0, layer_suite},
      {"overlap guarantee", ">= requested - 1e-6, warnings below 0.70/0.80", 10.0, overlap_suite},
      {"grid correctness", "exact counts, 476 per layer per direction", 1.0, grid_suite},
      {"shot invariants", "orbit 1e-9*r, elevator 1e-12, flyby 1e-9, chase 1e-6 after 5 s, angular size 1e-9", 5.0,
       shot_suite},
      {"simulator determinism", "bit-identical traces and events, 60 s, 2 drones, 3 actors, wind", 5.0,
       determinism_suite},
      {"landmark coverage", "orbit 1.0, behind 0.0, flyby equals per-frame count", 2.0, coverage_suite},
      {"I/O round trips", "positions 1e-6 m, all else exact, byte-deterministic, Litchi golden", 5.0, io_suite},
      {"CLI", "every subcommand, deterministic outputs, exit codes 0/1/2", 10.0, cli_suite},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = elapsed < cr.limit_s;
    const bool pass = check.failures == 0 && in_time;
    failed += !pass;
    std::printf("%s  %-40s [%s] %.3f s (limit %.0f s)", pass ? "PASS" : "FAIL", cr.name, cr.tolerance, elapsed,
                cr.limit_s);
    if (check.failures) std::printf("  %d failure(s), first: %s", check.failures, check.first.c_str());
    if (!in_time) std::printf("  over time limit");
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
