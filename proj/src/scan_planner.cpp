#include "dronecine/scan_planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dronecine/errors.hpp"

namespace dronecine::scan {

using geometry::cos_deg;
using geometry::sin_deg;

namespace {

// Achieved overlaps are compared against thresholds with this slack so that a
// spacing quantized exactly onto the requested value does not warn on
// floating-point noise.
constexpr double kThresholdSlack = 1e-9;

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(field) + " must be finite", field);
}

}  // namespace

EnuPoint ScanArea::x_axis() const { return {cos_deg(rotation_deg), sin_deg(rotation_deg), 0.0}; }

EnuPoint ScanArea::y_axis() const { return {-sin_deg(rotation_deg), cos_deg(rotation_deg), 0.0}; }

EnuPoint ScanArea::to_world(double x, double y) const {
  const EnuPoint ux = x_axis();
  const EnuPoint uy = y_axis();
  return {origin_corner.east + x * ux.east + y * uy.east,
          origin_corner.north + x * ux.north + y * uy.north, origin_corner.up};
}

std::pair<double, double> ScanArea::to_local(const EnuPoint& p) const {
  const EnuPoint d = p - origin_corner;
  const EnuPoint ux = x_axis();
  const EnuPoint uy = y_axis();
  return {d.east * ux.east + d.north * ux.north, d.east * uy.east + d.north * uy.north};
}

bool ScanArea::contains(const EnuPoint& p, double tolerance) const {
  const auto [x, y] = to_local(p);
  return x >= -tolerance && x <= length_x + tolerance && y >= -tolerance &&
         y <= length_y + tolerance;
}

void validate(const ScanArea& area) {
  if (!geometry::is_finite(area.origin_corner))
    throw InvalidArgument("area origin must be finite", "area.origin_corner");
  if (!(area.length_x > 0.0) || !std::isfinite(area.length_x))
    throw InvalidArgument("area length_x must be positive", "area.length_x_m");
  if (!(area.length_y > 0.0) || !std::isfinite(area.length_y))
    throw InvalidArgument("area length_y must be positive", "area.length_y_m");
  require_finite(area.rotation_deg, "area.rotation_deg");
}

void validate(const ScanConfig& config) {
  require_finite(config.base_height, "base_height_m");
  require_finite(config.avg_building_height, "avg_building_height_m");
  require_finite(config.max_building_height, "max_building_height_m");
  if (!(config.base_height > 0.0))
    throw InvalidArgument("base height must be positive", "base_height_m");
  if (!(config.avg_building_height >= 0.0))
    throw InvalidArgument("average building height must be non-negative", "avg_building_height_m");
  if (!(config.max_building_height >= config.avg_building_height))
    throw InvalidArgument("maximum building height must be >= average building height",
                          "max_building_height_m");
  if (!(config.in_track_overlap >= 0.0 && config.in_track_overlap <= 0.95))
    throw InvalidArgument("in-track overlap must lie in [0, 0.95]", "in_track_overlap");
  if (!(config.cross_track_overlap >= 0.0 && config.cross_track_overlap <= 0.95))
    throw InvalidArgument("cross-track overlap must lie in [0, 0.95]", "cross_track_overlap");
  for (double pitch : config.gimbal_pitch_per_layer) {
    if (!(pitch >= geometry::kMinGimbalPitch && pitch <= geometry::kMaxGimbalPitch))
      throw InvalidArgument("gimbal pitch must lie in [-30, 90]", "gimbal_pitch_per_layer_deg");
  }
  if (!(config.cruise_speed > 0.0) || !std::isfinite(config.cruise_speed))
    throw InvalidArgument("cruise speed must be positive", "cruise_speed_mps");
}

std::array<double, 3> layer_heights(const ScanConfig& config) {
  validate(config);
  return {config.base_height, config.base_height + config.avg_building_height,
          config.base_height + config.max_building_height};
}

double spacing_from_overlap(double footprint_extent, double overlap) {
  if (!(footprint_extent > 0.0) || !std::isfinite(footprint_extent))
    throw InvalidArgument("footprint extent must be positive", "footprint_extent_m");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw InvalidArgument("overlap must lie in [0, 1)", "overlap");
  return footprint_extent * (1.0 - overlap);
}

std::size_t station_count(double side, double max_spacing) {
  if (!(max_spacing > 0.0)) throw InvalidArgument("spacing must be positive", "spacing_m");
  const double intervals = std::max(1.0, std::ceil(side / max_spacing - 1e-9));
  return static_cast<std::size_t>(intervals) + 1;
}

std::vector<Leg> generate_grid(const ScanArea& area, double cross_spacing,
                               GridDirection direction) {
  validate(area);
  if (!(cross_spacing > 0.0) || !std::isfinite(cross_spacing))
    throw InvalidArgument("cross-track spacing must be positive", "cross_track_spacing_m");

  const bool along_x = direction == GridDirection::x;
  const double side = along_x ? area.length_y : area.length_x;
  const double travel = along_x ? area.length_x : area.length_y;
  const std::size_t n = station_count(side, cross_spacing);
  const double step = side / static_cast<double>(n - 1);

  std::vector<Leg> legs;
  legs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double offset = k + 1 == n ? side : static_cast<double>(k) * step;
    const bool forward = k % 2 == 0;
    const double a = forward ? 0.0 : travel;
    const double b = forward ? travel : 0.0;
    Leg leg;
    leg.direction = direction;
    leg.offset = offset;
    leg.start = along_x ? area.to_world(a, offset) : area.to_world(offset, a);
    leg.end = along_x ? area.to_world(b, offset) : area.to_world(offset, b);
    const EnuPoint d = leg.end - leg.start;
    leg.heading = geometry::bearing_deg(d.east, d.north);
    legs.push_back(std::move(leg));
  }
  return legs;
}

namespace {

void place_captures(const ScanArea& area, Leg& leg, double up, double in_spacing,
                    double gimbal_pitch) {
  const bool along_x = leg.direction == GridDirection::x;
  const double travel = along_x ? area.length_x : area.length_y;
  const std::size_t n = station_count(travel, in_spacing);
  const double step = travel / static_cast<double>(n - 1);
  // Even legs run from 0 to travel in the area frame, odd legs back.
  const auto [sx, sy] = area.to_local(leg.start);
  const double start_coord = along_x ? sx : sy;
  const bool reversed = start_coord > travel * 0.5;

  leg.start.up = up;
  leg.end.up = up;
  leg.captures.clear();
  leg.captures.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = j + 1 == n ? travel : static_cast<double>(j) * step;
    const double c = reversed ? travel - s : s;
    EnuPoint p = along_x ? area.to_world(c, leg.offset) : area.to_world(leg.offset, c);
    p.up = up;
    leg.captures.push_back(Pose{p, leg.heading, gimbal_pitch});
  }
}

}  // namespace

ScanPlan plan_scan(const ScanArea& area, const ScanConfig& config) {
  validate(area);
  const auto heights = layer_heights(config);

  ScanPlan plan;
  for (std::size_t k = 0; k < heights.size(); ++k) {
    ScanLayer layer;
    layer.height = heights[k];
    layer.gimbal_pitch = config.gimbal_pitch_per_layer[heights.size() - 1 - k];
    const auto footprint = geometry::ground_footprint(config.camera, layer.height);
    layer.in_track_spacing = spacing_from_overlap(footprint.in_track_extent, config.in_track_overlap);
    layer.cross_track_spacing =
        spacing_from_overlap(footprint.cross_track_extent, config.cross_track_overlap);

    const double up = area.origin_corner.up + layer.height;
    std::vector<GridDirection> passes{GridDirection::x};
    if (config.both_directions) passes.push_back(GridDirection::y);
    for (GridDirection direction : passes) {
      for (Leg& leg : generate_grid(area, layer.cross_track_spacing, direction)) {
        place_captures(area, leg, up, layer.in_track_spacing, layer.gimbal_pitch);
        layer.legs.push_back(std::move(leg));
      }
    }
    plan.layers.push_back(std::move(layer));
  }
  plan.total_image_count = estimate_image_count(plan);
  return plan;
}

std::size_t estimate_image_count(const ScanPlan& plan) {
  std::size_t count = 0;
  for (const ScanLayer& layer : plan.layers)
    for (const Leg& leg : layer.legs) count += leg.captures.size();
  return count;
}

double overlap_threshold(QualityMode mode) {
  return mode == QualityMode::detail ? 0.80 : 0.70;
}

namespace {

struct LegFrame {
  EnuPoint along;
  EnuPoint across;
};

LegFrame leg_frame(const Leg& leg) {
  EnuPoint d = leg.end - leg.start;
  d.up = 0.0;
  const double len = geometry::horizontal_norm(d);
  const EnuPoint along = len > 0.0 ? (1.0 / len) * d : geometry::heading_vector(leg.heading);
  return {along, {-along.north, along.east, 0.0}};
}

// Intersection area over footprint area for two equal, equally oriented
// rectangles whose centres differ by (d_along, d_across).
double rectangle_overlap(const geometry::GroundFootprint& fp, double d_along, double d_across) {
  const double a = std::max(0.0, 1.0 - std::abs(d_along) / fp.in_track_extent);
  const double c = std::max(0.0, 1.0 - std::abs(d_across) / fp.cross_track_extent);
  return a * c;
}

}  // namespace

OverlapReport verify_overlap(const ScanPlan& plan, const CameraIntrinsics& camera,
                             QualityMode mode) {
  OverlapReport report;
  report.mode = mode;
  report.threshold = overlap_threshold(mode);
  if (plan.layers.empty()) throw InsufficientData("plan has no layers", "layers");

  for (std::size_t li = 0; li < plan.layers.size(); ++li) {
    const ScanLayer& layer = plan.layers[li];
    if (layer.legs.empty())
      throw InsufficientData("layer " + std::to_string(li) + " has no legs", "layers");
    const auto fp = geometry::ground_footprint(camera, layer.height);
    LayerOverlap result;
    result.height = layer.height;

    for (std::size_t gi = 0; gi < layer.legs.size(); ++gi) {
      const Leg& leg = layer.legs[gi];
      if (leg.captures.size() < 2)
        throw InsufficientData("layer " + std::to_string(li) + " leg " + std::to_string(gi) +
                                   " has fewer than 2 capture points",
                               "captures");
      const LegFrame frame = leg_frame(leg);
      for (std::size_t j = 0; j + 1 < leg.captures.size(); ++j) {
        const EnuPoint d = leg.captures[j + 1].position - leg.captures[j].position;
        const double r = rectangle_overlap(fp, dot(d, frame.along), dot(d, frame.across));
        result.min_in_track = std::min(result.min_in_track, r);
        result.max_in_track = std::max(result.max_in_track, r);
        ++result.in_track_pairs;
      }

      if (gi + 1 >= layer.legs.size() || layer.legs[gi + 1].direction != leg.direction) continue;
      const Leg& next = layer.legs[gi + 1];
      for (const Pose& a : leg.captures) {
        // Pair with the neighbouring-leg capture nearest along track.
        double best_along = 0.0;
        double best_across = 0.0;
        bool found = false;
        for (const Pose& b : next.captures) {
          const EnuPoint d = b.position - a.position;
          const double along = dot(d, frame.along);
          if (!found || std::abs(along) < std::abs(best_along)) {
            best_along = along;
            best_across = dot(d, frame.across);
            found = true;
          }
        }
        const double r = rectangle_overlap(fp, best_along, best_across);
        result.min_cross_track = std::min(result.min_cross_track.value_or(1.0), r);
        result.max_cross_track = std::max(result.max_cross_track.value_or(0.0), r);
        ++result.cross_track_pairs;
      }
    }

    report.min_in_track = std::min(report.min_in_track, result.min_in_track);
    if (result.min_in_track < report.threshold - kThresholdSlack)
      report.warnings.push_back({li, OverlapAxis::in_track, result.min_in_track, report.threshold});
    if (result.min_cross_track) {
      report.min_cross_track = std::min(report.min_cross_track.value_or(1.0), *result.min_cross_track);
      if (*result.min_cross_track < report.threshold - kThresholdSlack)
        report.warnings.push_back(
            {li, OverlapAxis::cross_track, *result.min_cross_track, report.threshold});
    }
    report.layers.push_back(result);
  }
  return report;
}

}  // namespace dronecine::scan
