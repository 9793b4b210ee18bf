#include <doctest.h>

#include <random>
#include <set>

#include "dronecine/errors.hpp"
#include "dronecine/scan_planner.hpp"
#include "oracles.hpp"

using namespace dronecine;
using namespace dronecine::scan;

TEST_CASE("layer heights") {
  ScanConfig c;
  c.base_height = 20;
  c.avg_building_height = 8.5;
  c.max_building_height = 31;
  const auto h = layer_heights(c);
  CHECK(h[0] == 20.0);
  CHECK(h[1] == 28.5);
  CHECK(h[2] == 51.0);

  c.max_building_height = 5;
  CHECK_THROWS_AS(layer_heights(c), InvalidArgument);
  c = {};
  c.base_height = 0;
  CHECK_THROWS_AS(layer_heights(c), InvalidArgument);
}

TEST_CASE("default gimbal assignment runs 35/60/85 from the lowest layer up") {
  ScanConfig c;
  c.avg_building_height = 5;
  c.max_building_height = 12;
  const ScanPlan plan = plan_scan({}, c);
  REQUIRE(plan.layers.size() == 3);
  CHECK(plan.layers[0].height < plan.layers[1].height);
  CHECK(plan.layers[1].height < plan.layers[2].height);
  CHECK(plan.layers[0].gimbal_pitch == 35.0);
  CHECK(plan.layers[1].gimbal_pitch == 60.0);
  CHECK(plan.layers[2].gimbal_pitch == 85.0);
  for (const auto& layer : plan.layers)
    for (const auto& leg : layer.legs)
      for (const auto& p : leg.captures) CHECK(p.gimbal_pitch == layer.gimbal_pitch);
}

TEST_CASE("spacing and station counts") {
  CHECK(spacing_from_overlap(10.0, 0.8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(spacing_from_overlap(10.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(spacing_from_overlap(-1.0, 0.5), InvalidArgument);
  CHECK(station_count(10.0, 2.0) == 6);
  CHECK(station_count(10.0, 2.5) == 5);
  CHECK(station_count(10.0, 100.0) == 2);
  CHECK(station_count(50.0, 1.52) == 34);
  CHECK(station_count(50.0, 4.056) == 14);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> side(0.5, 400), sp(0.3, 60);
  for (int i = 0; i < 2000; ++i) {
    const double s = side(rng), w = sp(rng);
    CHECK(station_count(s, w) == oracle::stations_by_search(s, w));
  }
}

TEST_CASE("the 50 x 50 m default scan") {
  const ScanPlan plan = plan_scan({}, {});
  REQUIRE(plan.layers.size() == 3);
  for (const auto& layer : plan.layers) {
    std::size_t x = 0, y = 0, x_legs = 0;
    for (const auto& leg : layer.legs) {
      (leg.direction == GridDirection::x ? x : y) += leg.captures.size();
      x_legs += leg.direction == GridDirection::x;
      CHECK(leg.captures.size() == 34);
    }
    CHECK(x_legs == 14);
    CHECK(x == 476);
    CHECK(y == 476);
  }
  CHECK(plan.total_image_count == 2856);
  CHECK(estimate_image_count(plan) == 2856);
}

TEST_CASE("grid geometry") {
  ScanArea area;
  area.origin_corner = {100, -40, 3};
  area.length_x = 80;
  area.length_y = 30;
  area.rotation_deg = 30;
  const auto legs = generate_grid(area, 7.0, GridDirection::x);
  REQUIRE(legs.size() == oracle::stations_by_search(30, 7.0));
  CHECK(legs.front().offset == 0.0);
  CHECK(legs.back().offset == 30.0);
  for (std::size_t k = 0; k < legs.size(); ++k) {
    CHECK(legs[k].captures.empty());
    // Serpentine: even legs along +x, odd legs back.
    const double expected = k % 2 == 0 ? 60.0 : 240.0;
    CHECK(legs[k].heading == doctest::Approx(expected));
    CHECK(area.contains(legs[k].start));
    CHECK(area.contains(legs[k].end));
    if (k) CHECK(legs[k].offset - legs[k - 1].offset <= 7.0 + 1e-12);
  }
  CHECK_THROWS_AS(generate_grid(area, 0.0, GridDirection::x), InvalidArgument);
}

TEST_CASE("captures follow their leg and stay in the area") {
  ScanArea area;
  area.length_x = 73;
  area.length_y = 41;
  area.rotation_deg = -17;
  ScanConfig config;
  config.avg_building_height = 4;
  config.max_building_height = 9;
  const ScanPlan plan = plan_scan(area, config);
  for (const auto& layer : plan.layers) {
    for (const auto& leg : layer.legs) {
      REQUIRE(leg.captures.size() >= 2);
      CHECK(geometry::distance(leg.captures.front().position, leg.start) < 1e-9);
      CHECK(geometry::distance(leg.captures.back().position, leg.end) < 1e-9);
      for (const auto& p : leg.captures) {
        CHECK(area.contains(p.position));
        CHECK(p.position.up == layer.height);
        CHECK(p.yaw == leg.heading);
      }
    }
  }
}

TEST_CASE("image counts match the closed form on axis-aligned rectangles") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> len(5, 300), h(5, 120), ov(0.0, 0.9), bld(0, 30);
  for (int i = 0; i < 100; ++i) {
    ScanArea area;
    area.length_x = len(rng);
    area.length_y = len(rng);
    ScanConfig c;
    c.base_height = h(rng);
    c.avg_building_height = bld(rng);
    c.max_building_height = c.avg_building_height + bld(rng);
    c.in_track_overlap = ov(rng);
    c.cross_track_overlap = ov(rng);
    c.both_directions = i % 3 != 0;
    const ScanPlan plan = plan_scan(area, c);
    const auto hs = layer_heights(c);
    const auto expected = oracle::closed_form_count(area.length_x, area.length_y, {hs.begin(), hs.end()},
                                                    23.66, 13.3, 35.0, c.in_track_overlap,
                                                    c.cross_track_overlap, c.both_directions);
    CHECK(plan.total_image_count == expected);
    CHECK(estimate_image_count(plan) == expected);
  }
}

TEST_CASE("achieved overlap meets the request") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> len(5, 200), h(10, 80), ov(0.0, 0.9), rot(-180, 180);
  for (int i = 0; i < 60; ++i) {
    ScanArea area;
    area.length_x = len(rng);
    area.length_y = len(rng);
    area.rotation_deg = rot(rng);
    ScanConfig c;
    c.base_height = h(rng);
    c.in_track_overlap = ov(rng);
    c.cross_track_overlap = ov(rng);
    const ScanPlan plan = plan_scan(area, c);
    const auto report = verify_overlap(plan, c.camera);
    CHECK(report.min_in_track >= c.in_track_overlap - 1e-6);
    REQUIRE(report.min_cross_track);
    CHECK(*report.min_cross_track >= c.cross_track_overlap - 1e-6);

    // Closed form: quantized spacing over the footprint extent.
    const auto fp = geometry::ground_footprint(c.camera, c.base_height);
    const double in_sp = fp.in_track_extent * (1 - c.in_track_overlap);
    const double nx = static_cast<double>(oracle::stations_by_search(area.length_x, in_sp));
    const double ny = static_cast<double>(oracle::stations_by_search(area.length_y, in_sp));
    const double worst_in = std::min(oracle::overlap_fraction(fp.in_track_extent, area.length_x / (nx - 1)),
                                     oracle::overlap_fraction(fp.in_track_extent, area.length_y / (ny - 1)));
    CHECK(report.min_in_track == doctest::Approx(worst_in).epsilon(1e-9));
  }
}

TEST_CASE("threshold warnings") {
  CHECK(overlap_threshold(QualityMode::landscape) == 0.70);
  CHECK(overlap_threshold(QualityMode::detail) == 0.80);

  ScanConfig c;
  c.in_track_overlap = 0.85;
  c.cross_track_overlap = 0.75;
  const ScanPlan plan = plan_scan({}, c);
  CHECK(verify_overlap(plan, c.camera, QualityMode::landscape).warnings.empty());
  const auto detail = verify_overlap(plan, c.camera, QualityMode::detail);
  REQUIRE(!detail.warnings.empty());
  for (const auto& w : detail.warnings) {
    CHECK(w.axis == OverlapAxis::cross_track);
    CHECK(w.achieved < 0.80);
    CHECK(w.threshold == 0.80);
  }

  c.in_track_overlap = 0.6;
  const auto low = verify_overlap(plan_scan({}, c), c.camera, QualityMode::landscape);
  std::set<std::size_t> layers;
  for (const auto& w : low.warnings)
    if (w.axis == OverlapAxis::in_track) layers.insert(w.layer);
  CHECK(layers.size() == 3);
}

TEST_CASE("single-leg plans report no cross-track pairs") {
  ScanArea area;
  area.length_x = 60;
  area.length_y = 0.5;
  ScanConfig c;
  c.both_directions = false;
  const ScanPlan plan = plan_scan(area, c);
  const auto report = verify_overlap(plan, c.camera);
  // A 0.5 m strip still needs two legs (both edges).
  CHECK(plan.layers[0].legs.size() == 2);
  CHECK(report.min_cross_track.has_value());
}

TEST_CASE("verify_overlap needs captures") {
  ScanPlan plan;
  CHECK_THROWS_AS(verify_overlap(plan, geometry::CameraIntrinsics::reference()), InsufficientData);
  plan = plan_scan({}, {});
  plan.layers[1].legs[3].captures.resize(1);
  CHECK_THROWS_AS(verify_overlap(plan, geometry::CameraIntrinsics::reference()), InsufficientData);
}

TEST_CASE("invalid areas") {
  ScanArea a;
  a.length_x = 0;
  CHECK_THROWS_AS(plan_scan(a, {}), InvalidArgument);
  a = {};
  a.rotation_deg = std::nan("");
  CHECK_THROWS_AS(plan_scan(a, {}), InvalidArgument);
  ScanConfig c;
  c.in_track_overlap = 0.99;
  CHECK_THROWS_AS(plan_scan({}, c), InvalidArgument);
}
