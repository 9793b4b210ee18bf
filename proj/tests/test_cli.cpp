#include <doctest.h>

#include <httplib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dronecine/cli.hpp"
#include "dronecine/flightplan_io.hpp"

namespace fs = std::filesystem;
using namespace dronecine;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const fs::path kFixtures = fs::path(DRONECINE_TEST_DATA) / "fixtures";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dronecine_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"plan-scan", "--help"}).code == cli::kExitOk);
  CHECK(run({}).code == cli::kExitValidation);
  CHECK(run({"fly"}).code == cli::kExitValidation);
  CHECK(run({"plan-scan"}).code == cli::kExitValidation);  // --out is required
  CHECK(run({"plan-scan", "--out", "x.json", "--bogus"}).code == cli::kExitValidation);
  CHECK(run({"plan-scan", "--out", "x.json", "--length-x-m", "abc"}).code == cli::kExitValidation);
}

TEST_CASE("plan-scan writes a deterministic plan and manifest") {
  TempDir tmp("plan");
  const Result r = run({"plan-scan", "--out", tmp / "a.json"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("layers: 3") != std::string::npos);
  CHECK(r.out.find("total image count: 2856") != std::string::npos);
  const std::string manifest = slurp(tmp / "a.json.manifest.csv");
  CHECK(line_count(manifest) == 2857);
  CHECK(manifest.find("0,0.0000000,0.0000000,20.000,90.00,35.00\n") != std::string::npos);

  const Result again = run({"plan-scan", "--out", tmp / "b.json", "--manifest", tmp / "b.csv"});
  CHECK(again.out == r.out);
  CHECK(slurp(tmp / "a.json") == slurp(tmp / "b.json"));
  CHECK(slurp(tmp / "b.csv") == manifest);

  const Result rotated = run({"plan-scan", "--out", tmp / "c.json", "--length-x-m", "80", "--length-y-m", "30",
                              "--rotation-deg", "25", "--avg-building-height-m", "6", "--max-building-height-m",
                              "15", "--gimbal-pitch-per-layer-deg", "80", "55", "30", "--single-direction"});
  CHECK(rotated.code == cli::kExitOk);
  const auto doc = io::load_scan_plan_document(slurp(tmp / "c.json"));
  CHECK(doc.plan.layers[2].gimbal_pitch == 80.0);
  CHECK(doc.plan.layers[0].height == 20.0);
  CHECK(doc.plan.layers[2].height == 35.0);

  const Result bad = run({"plan-scan", "--out", tmp / "d.json", "--in-track-overlap", "0.99"});
  CHECK(bad.code == cli::kExitValidation);
  CHECK(bad.err.find("in_track_overlap") != std::string::npos);
  CHECK(run({"plan-scan", "--out", tmp / "missing-dir/x.json"}).code == cli::kExitIo);
}

TEST_CASE("shot generates trajectories and flight plans") {
  TempDir tmp("shot");
  const Result r = run({"shot", "--type", "ORBIT", "--radius", "30", "--out", tmp / "orbit.json", "--flight-plan",
                        tmp / "orbit.plan.json"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("samples: 755") != std::string::npos);
  const auto doc = io::load_trajectory_document(slurp(tmp / "orbit.json"));
  CHECK(doc.trajectory.samples.size() == 755);
  const auto plan = io::load_flight_plan_document(slurp(tmp / "orbit.plan.json"));
  CHECK(plan.waypoints.size() == 39);

  const Result again = run({"shot", "--type", "orbit", "--radius", "30", "--out", tmp / "orbit2.json"});
  CHECK(slurp(tmp / "orbit2.json") == slurp(tmp / "orbit.json"));

  CHECK(run({"shot", "--type", "CHASE", "--out", tmp / "c.json"}).code == cli::kExitValidation);
  const Result chase = run({"shot", "--type", "CHASE", "--target-path", "0,0;100,0", "--target-speed-mps", "5",
                            "--chase-duration-s", "10", "--out", tmp / "chase.json"});
  CHECK(chase.code == cli::kExitOk);
  CHECK(run({"shot", "--type", "DOLLY", "--out", tmp / "x.json"}).code == cli::kExitValidation);
  CHECK(run({"shot", "--type", "ELEVATOR", "--elevator-start-height-m", "10", "--elevator-end-height-m", "10",
             "--out", tmp / "x.json"})
            .code == cli::kExitValidation);
  CHECK(run({"shot", "--target-path", "0,a", "--type", "CHASE", "--out", tmp / "x.json"}).code == cli::kExitValidation);
}

TEST_CASE("simulate runs the fixture project deterministically") {
  TempDir tmp("sim");
  const std::vector<std::string> base = {"simulate", "--project", (kFixtures / "project.json").string(),
                                         "--inputs", (kFixtures / "inputs.csv").string(), "--manual-drone", "1",
                                         "--duration-s", "60"};
  auto with = [&](const std::string& tag) {
    auto a = base;
    a.insert(a.end(), {"--trace", tmp / (tag + ".trace.csv"), "--events", tmp / (tag + ".events.csv")});
    return a;
  };
  const Result a = run(with("a"));
  const Result b = run(with("b"));
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("ticks: 1200") != std::string::npos);
  const std::string trace = slurp(tmp / "a.trace.csv");
  CHECK(trace == slurp(tmp / "b.trace.csv"));
  CHECK(slurp(tmp / "a.events.csv") == slurp(tmp / "b.events.csv"));
  CHECK(trace.rfind("tick,time_s,type,id,east_m,north_m,up_m,yaw_deg,gimbal_pitch_deg,vel_east_mps,vel_north_mps,vel_up_mps\n", 0) == 0);
  CHECK(line_count(trace) == 1 + 1201 * 5);

  const Result windy = run({"simulate", "--project", (kFixtures / "project.json").string(), "--duration-s", "5",
                            "--wind-east-mps", "6", "--seed", "3"});
  CHECK(windy.code == cli::kExitOk);
  CHECK(windy.out != run({"simulate", "--project", (kFixtures / "project.json").string(), "--duration-s", "5"}).out);

  CHECK(run({"simulate", "--project", tmp / "none.json"}).code == cli::kExitIo);
  {
    std::ofstream bad(tmp / "bad.csv");
    bad << "0,1,forward\n";
  }
  CHECK(run({"simulate", "--project", (kFixtures / "project.json").string(), "--inputs", tmp / "bad.csv"}).code ==
        cli::kExitValidation);
  CHECK(run({"simulate", "--project", (kFixtures / "project.json").string(), "--duration-s", "-1"}).code ==
        cli::kExitValidation);
}

TEST_CASE("simulate reports landmark coverage of a trajectory") {
  TempDir tmp("cov");
  REQUIRE(run({"shot", "--type", "ORBIT", "--target-east-m", "5", "--out", tmp / "o.json"}).code == cli::kExitOk);
  const Result r = run({"simulate", "--trajectory", tmp / "o.json", "--duration-s", "20"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("drone 1 coverage: 1\n") != std::string::npos);
  const Result behind = run({"simulate", "--trajectory", tmp / "o.json", "--duration-s", "20", "--landmark-up-m", "500"});
  CHECK(behind.out.find("drone 1 coverage: 0\n") != std::string::npos);
}

TEST_CASE("verify-overlap") {
  TempDir tmp("ov");
  REQUIRE(run({"plan-scan", "--out", tmp / "p.json"}).code == cli::kExitOk);
  const Result ok = run({"verify-overlap", "--plan", tmp / "p.json"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("80.06%") != std::string::npos);
  CHECK(ok.out.find("71.55%") != std::string::npos);
  CHECK(ok.out.find("overlap OK") != std::string::npos);
  const Result detail = run({"verify-overlap", "--plan", tmp / "p.json", "--mode", "detail"});
  CHECK(detail.code == cli::kExitOk);
  CHECK(detail.out.find("WARNING: layer 0 cross-track overlap 71.55%") != std::string::npos);
  CHECK(run({"verify-overlap", "--plan", tmp / "p.json", "--mode", "detail", "--strict"}).code == cli::kExitValidation);
  CHECK(run({"verify-overlap", "--plan", tmp / "p.json", "--mode", "rough"}).code == cli::kExitValidation);
  CHECK(run({"verify-overlap", "--plan", tmp / "none.json"}).code == cli::kExitIo);
}

TEST_CASE("export converts every input kind") {
  TempDir tmp("export");
  REQUIRE(run({"plan-scan", "--out", tmp / "p.json", "--origin-latitude-deg", "45.5", "--origin-longitude-deg", "6.1"}).code ==
          cli::kExitOk);
  REQUIRE(run({"shot", "--type", "FLYBY", "--out", tmp / "t.json"}).code == cli::kExitOk);

  CHECK(run({"export", "--in", tmp / "p.json", "--format", "qgc", "--out", tmp / "p.plan"}).code == cli::kExitOk);
  const auto qgc = io::import_qgc_plan(slurp(tmp / "p.plan"));
  CHECK(qgc.waypoints.size() == 2856);
  CHECK(run({"export", "--in", tmp / "p.json", "--format", "qgc", "--out", tmp / "p2.plan"}).code == cli::kExitOk);
  CHECK(slurp(tmp / "p.plan") == slurp(tmp / "p2.plan"));

  const Result litchi = run({"export", "--in", tmp / "t.json", "--format", "litchi"});
  CHECK(litchi.code == cli::kExitOk);
  CHECK(litchi.out.rfind("latitude,longitude,altitude(m),heading(deg),curvesize(m),rotationdir,gimbalmode,gimbalpitchangle,actiontype1\n", 0) == 0);
  CHECK(line_count(litchi.out) == 22);  // 20 s pass at 1 s spacing plus header

  CHECK(run({"export", "--in", tmp / "p.plan", "--format", "json", "--out", tmp / "fp.json"}).code == cli::kExitOk);
  CHECK(io::load_flight_plan_document(slurp(tmp / "fp.json")).waypoints.size() == 2856);
  CHECK(run({"export", "--in", tmp / "fp.json", "--format", "qgc", "--out", tmp / "p3.plan"}).code == cli::kExitOk);
  CHECK(io::import_qgc_plan(slurp(tmp / "p3.plan")) == io::import_qgc_plan(slurp(tmp / "p.plan")));

  const Result manifest = run({"export", "--in", tmp / "p.json", "--format", "manifest"});
  CHECK(line_count(manifest.out) == 2857);
  CHECK(run({"export", "--in", tmp / "t.json", "--format", "manifest"}).code == cli::kExitValidation);

  const Result proj = run({"export", "--in", (kFixtures / "project.json").string(), "--format", "litchi", "--source",
                           "shot", "--id", "1"});
  CHECK(proj.code == cli::kExitOk);
  CHECK(line_count(proj.out) > 40);
  CHECK(run({"export", "--in", (kFixtures / "project.json").string(), "--format", "qgc", "--source", "shot", "--id",
             "7"})
            .code == cli::kExitValidation);
  CHECK(run({"export", "--in", tmp / "p.json", "--format", "kml"}).code == cli::kExitValidation);
  CHECK(run({"export", "--in", tmp / "none.json", "--format", "qgc"}).code == cli::kExitIo);
  {
    std::ofstream junk(tmp / "junk.json");
    junk << "{\"hello\": ";
  }
  CHECK(run({"export", "--in", tmp / "junk.json", "--format", "qgc"}).code == cli::kExitValidation);
}

TEST_CASE("serve answers on an ephemeral port and shuts down") {
  const std::string cmd = std::string(DRONECINE_CLI_PATH) + " serve --port 0 --allow-shutdown --manual-clock";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char line[256] = {};
  REQUIRE(std::fgets(line, sizeof line, pipe));
  const std::string first(line);
  const std::string prefix = "listening on http://127.0.0.1:";
  REQUIRE(first.rfind(prefix, 0) == 0);
  const int port = std::stoi(first.substr(prefix.size()));
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(5, 0);
  const auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  const auto created = client.Post("/v1/sessions", "", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto bye = client.Post("/v1/shutdown", "", "application/json");
  REQUIRE(bye);
  CHECK(bye->status == 200);
  const int status = pclose(pipe);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  CHECK(run({"serve", "--port", "70000"}).code == cli::kExitValidation);
}
