#pragma once

// Fixed scenarios shared by the unit suites and the acceptance runner.

#include <cmath>
#include <memory>
#include <vector>

#include "dronecine/shot_grammar.hpp"
#include "dronecine/sim_engine.hpp"

namespace scenario {

using dronecine::geometry::EnuPoint;
namespace sim = dronecine::sim;
namespace shot = dronecine::shot;

// Rolling 401 x 401 m terrain, 5 m cells, centred on the origin.
inline sim::Terrain rolling_terrain() {
  const std::size_t n = 81;
  std::vector<double> h(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      h[j * n + i] = 2.0 + 1.5 * std::sin(0.11 * static_cast<double>(i)) *
                               std::cos(0.07 * static_cast<double>(j));
  return sim::Terrain(n, n, 5.0, std::move(h), -200.0, -200.0);
}

// Manual stick inputs for drone 1: a climb, a turning cruise, a gimbal sweep
// and a descent toward the actors, changing every few seconds.
inline std::vector<sim::ControlRecord> scripted_inputs(std::uint64_t ticks) {
  std::vector<sim::ControlRecord> out;
  for (std::uint64_t k = 0; k < ticks; ++k) {
    sim::ControlInput in;
    const double t = static_cast<double>(k) * 0.05;
    if (t < 4) {
      in.climb = 0.8;
    } else if (t < 20) {
      in.forward = 0.6;
      in.yaw_rate = 0.25;
      in.gimbal_rate = t < 10 ? 0.5 : -0.2;
    } else if (t < 35) {
      in.forward = 0.3;
      in.right = -0.4;
      in.climb = -0.35;
    } else if (t < 50) {
      in.forward = 1.0;
      in.yaw_rate = -0.5;
    } else if (k % 7 != 0) {
      in.right = 0.5;
      in.climb = 0.1;
    }
    out.push_back({k, 1, in});
  }
  return out;
}

// 2 drones (1 manual, 2 orbiting the car's start), 3 actors, gusting wind.
inline sim::World determinism_world() {
  sim::World w;
  w.terrain = rolling_terrain();
  w.wind.mean = {1.5, -0.8, 0.0};
  w.wind.gust_amplitude = 1.2;
  w.wind.gust_period = 6.5;
  w.wind.phase_seed = 20240611;

  w.actors.push_back(sim::make_actor(1, sim::ActorKind::car, {{-60, -20, 2}, {60, -20, 2}, {60, 40, 2}}, 8.0, true));
  w.actors.push_back(sim::make_actor(2, sim::ActorKind::cyclist, {{0, 0, 2}, {0, 120, 3}}, 4.5, false));
  w.actors.push_back(sim::make_actor(3, sim::ActorKind::boat, {{-100, 80, 0}, {100, 80, 0}, {100, 100, 0}}, 3.0, true));

  sim::DroneState manual_start;
  manual_start.position = {0, -30, 6};
  manual_start.yaw = 10;
  w.drones.push_back(sim::make_drone(1, sim::Manual{}, manual_start, {}));

  shot::ShotSpec orbit;
  orbit.target = EnuPoint{-60, -20, 2};
  orbit.orbit_radius = 25;
  orbit.height = 15;
  orbit.orbit_arc_deg = 540;
  auto traj = std::make_shared<const shot::Trajectory>(shot::generate_shot(orbit, 0.05));
  w.drones.push_back(sim::make_drone(2, sim::FollowTrajectory{traj}, {}, {}));
  return w;
}

}  // namespace scenario
