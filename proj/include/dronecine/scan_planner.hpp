#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "dronecine/geometry.hpp"

namespace dronecine::scan {

using geometry::CameraIntrinsics;
using geometry::EnuPoint;
using geometry::Pose;

/// Rectangular survey area. The grid frame's x axis is rotated
/// counter-clockwise from east by `rotation_deg`; `origin_corner` is its (0, 0).
struct ScanArea {
  EnuPoint origin_corner;
  double length_x = 50.0;
  double length_y = 50.0;
  double rotation_deg = 0.0;

  EnuPoint x_axis() const;
  EnuPoint y_axis() const;
  EnuPoint to_world(double x, double y) const;
  std::pair<double, double> to_local(const EnuPoint& p) const;
  bool contains(const EnuPoint& p, double tolerance = 1e-9) const;

  friend bool operator==(const ScanArea&, const ScanArea&) = default;
};
void validate(const ScanArea& area);

struct ScanConfig {
  double base_height = 20.0;
  double avg_building_height = 0.0;
  double max_building_height = 0.0;
  double in_track_overlap = 0.80;
  double cross_track_overlap = 0.70;
  // Highest layer first.
  std::array<double, 3> gimbal_pitch_per_layer{85.0, 60.0, 35.0};
  CameraIntrinsics camera = CameraIntrinsics::reference();
  double cruise_speed = 5.0;
  bool both_directions = true;

  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};
void validate(const ScanConfig& config);

enum class GridDirection { x, y };

// One straight sweep. `offset` is the leg's coordinate on the axis
// perpendicular to travel, in the area frame.
struct Leg {
  GridDirection direction = GridDirection::x;
  double offset = 0.0;
  EnuPoint start;
  EnuPoint end;
  double heading = 0.0;
  std::vector<Pose> captures;

  friend bool operator==(const Leg&, const Leg&) = default;
};

// cross_track_spacing / in_track_spacing hold the nominal spacing derived from
// the requested overlaps; legs and captures use the quantized spacing
// side / ceil(side / nominal), which never exceeds the nominal value.
struct ScanLayer {
  double height = 0.0;
  double gimbal_pitch = 0.0;
  double cross_track_spacing = 0.0;
  double in_track_spacing = 0.0;
  std::vector<Leg> legs;

  friend bool operator==(const ScanLayer&, const ScanLayer&) = default;
};

struct ScanPlan {
  std::vector<ScanLayer> layers;
  std::size_t total_image_count = 0;

  friend bool operator==(const ScanPlan&, const ScanPlan&) = default;
};

/// [H, H + average building height, H + maximum building height].
std::array<double, 3> layer_heights(const ScanConfig& config);

double spacing_from_overlap(double footprint_extent, double overlap);

/// Number of evenly spaced stations covering `side` inclusive of both ends
/// with spacing no larger than `max_spacing`.
std::size_t station_count(double side, double max_spacing);

/// Serpentine legs at up = origin_corner.up; captures are left empty.
std::vector<Leg> generate_grid(const ScanArea& area, double cross_spacing, GridDirection direction);

ScanPlan plan_scan(const ScanArea& area, const ScanConfig& config);

std::size_t estimate_image_count(const ScanPlan& plan);

enum class QualityMode { landscape, detail };
enum class OverlapAxis { in_track, cross_track };

/// Minimum acceptable overlap: 0.70 for landscape shape, 0.80 for local detail.
double overlap_threshold(QualityMode mode);

struct LayerOverlap {
  double height = 0.0;
  double min_in_track = 1.0;
  double max_in_track = 0.0;
  std::size_t in_track_pairs = 0;
  std::optional<double> min_cross_track;
  std::optional<double> max_cross_track;
  std::size_t cross_track_pairs = 0;
};

struct OverlapWarning {
  std::size_t layer = 0;
  OverlapAxis axis = OverlapAxis::in_track;
  double achieved = 0.0;
  double threshold = 0.0;
};

struct OverlapReport {
  QualityMode mode = QualityMode::landscape;
  double threshold = 0.0;
  std::vector<LayerOverlap> layers;
  double min_in_track = 1.0;
  std::optional<double> min_cross_track;
  std::vector<OverlapWarning> warnings;
};

/// Achieved ground-footprint overlaps of a plan over flat terrain, using
/// nadir-equivalent footprints at each layer's height.
OverlapReport verify_overlap(const ScanPlan& plan, const CameraIntrinsics& camera,
                             QualityMode mode = QualityMode::landscape);

}  // namespace dronecine::scan
