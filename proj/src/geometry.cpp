#include "dronecine/geometry.hpp"

#include <string>

#include "dronecine/errors.hpp"

namespace dronecine::geometry {

namespace {

// Returns the quadrant index when deg is an exact multiple of 90.
bool exact_quadrant(double deg, int& quadrant) {
  const double q = deg / 90.0;
  if (q != std::floor(q) || std::abs(q) > 1e15) return false;
  long long k = static_cast<long long>(q) % 4;
  if (k < 0) k += 4;
  quadrant = static_cast<int>(k);
  return true;
}

}  // namespace

bool is_finite(const EnuPoint& p) {
  return std::isfinite(p.east) && std::isfinite(p.north) && std::isfinite(p.up);
}

double sin_deg(double deg) {
  static constexpr double kTable[] = {0.0, 1.0, 0.0, -1.0};
  int q = 0;
  if (exact_quadrant(deg, q)) return kTable[q];
  return std::sin(deg_to_rad(deg));
}

double cos_deg(double deg) {
  static constexpr double kTable[] = {1.0, 0.0, -1.0, 0.0};
  int q = 0;
  if (exact_quadrant(deg, q)) return kTable[q];
  return std::cos(deg_to_rad(deg));
}

double normalize_yaw(double deg) {
  double y = std::fmod(deg, 360.0);
  if (y < 0.0) y += 360.0;
  // fmod of a tiny negative value can round back up to 360.
  if (y >= 360.0) y = 0.0;
  return y + 0.0;  // folds -0.0 into +0.0
}

double bearing_deg(double east, double north) {
  return normalize_yaw(rad_to_deg(std::atan2(east, north)));
}

EnuPoint heading_vector(double bearing) {
  return {sin_deg(bearing), cos_deg(bearing), 0.0};
}

CameraIntrinsics::CameraIntrinsics(double sensor_width_mm, double sensor_height_mm,
                                   double focal_length_mm)
    : sensor_width_(sensor_width_mm),
      sensor_height_(sensor_height_mm),
      focal_length_(focal_length_mm) {
  if (!(sensor_width_ > 0.0) || !std::isfinite(sensor_width_))
    throw InvalidArgument("sensor width must be positive", "sensor_width_mm");
  if (!(sensor_height_ > 0.0) || !std::isfinite(sensor_height_))
    throw InvalidArgument("sensor height must be positive", "sensor_height_mm");
  if (!(focal_length_ > 0.0) || !std::isfinite(focal_length_))
    throw InvalidArgument("focal length must be positive", "focal_length_mm");
  if (sensor_width_ < sensor_height_)
    throw InvalidArgument("sensor must be landscape (width >= height)", "sensor_width_mm");
}

CameraIntrinsics CameraIntrinsics::reference() { return {23.66, 13.3, 35.0}; }

double CameraIntrinsics::half_fov_horizontal() const {
  return std::atan(sensor_width_ / (2.0 * focal_length_));
}

double CameraIntrinsics::half_fov_vertical() const {
  return std::atan(sensor_height_ / (2.0 * focal_length_));
}

ReferenceSetup::ReferenceSetup(CameraIntrinsics camera, double working_distance)
    : camera_(camera), working_distance_(working_distance) {
  if (!(working_distance_ > 0.0) || !std::isfinite(working_distance_))
    throw InvalidArgument("reference working distance must be positive", "working_distance_m");
}

void validate(const GeoOrigin& origin) {
  if (!std::isfinite(origin.latitude) || std::abs(origin.latitude) >= 90.0)
    throw InvalidArgument("latitude must lie in (-90, 90)", "origin.latitude_deg");
  if (!std::isfinite(origin.longitude) || std::abs(origin.longitude) > 180.0)
    throw InvalidArgument("longitude must lie in [-180, 180]", "origin.longitude_deg");
  if (!std::isfinite(origin.altitude))
    throw InvalidArgument("altitude must be finite", "origin.altitude_m");
}

void validate(const Pose& pose) {
  if (!is_finite(pose.position)) throw InvalidArgument("pose position must be finite", "position");
  if (!(pose.yaw >= 0.0 && pose.yaw < 360.0))
    throw InvalidArgument("yaw must lie in [0, 360)", "yaw_deg");
  if (!(pose.gimbal_pitch >= kMinGimbalPitch && pose.gimbal_pitch <= kMaxGimbalPitch))
    throw InvalidArgument("gimbal pitch must lie in [-30, 90]", "gimbal_pitch_deg");
}

Pose make_pose(const EnuPoint& position, double yaw, double gimbal_pitch) {
  if (!std::isfinite(yaw)) throw InvalidArgument("yaw must be finite", "yaw_deg");
  Pose pose{position, normalize_yaw(yaw), gimbal_pitch};
  validate(pose);
  return pose;
}

GroundFootprint ground_footprint(const CameraIntrinsics& camera, double working_distance) {
  if (!(working_distance > 0.0) || !std::isfinite(working_distance))
    throw InvalidArgument("working distance must be positive", "working_distance_m");
  return {camera.sensor_height() * working_distance / camera.focal_length(),
          camera.sensor_width() * working_distance / camera.focal_length()};
}

double scale_working_distance(const ReferenceSetup& ref, const CameraIntrinsics& actual,
                              FootprintAxis axis) {
  const bool cross = axis == FootprintAxis::cross_track;
  const double ss_ref = cross ? ref.camera().sensor_width() : ref.camera().sensor_height();
  const double ss_act = cross ? actual.sensor_width() : actual.sensor_height();
  return (ss_ref / ss_act) * (actual.focal_length() / ref.camera().focal_length()) *
         ref.working_distance();
}

namespace {

void check_conversion_domain(const GeoOrigin& origin) {
  validate(origin);
  if (std::abs(origin.latitude) >= 89.9)
    throw UnsupportedLatitude("origin latitude " + std::to_string(origin.latitude) +
                                  " is outside the equirectangular model's domain",
                              "origin.latitude_deg");
}

double wrap_longitude(double lon) {
  double wrapped = std::fmod(lon + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  return wrapped - 180.0;
}

}  // namespace

Geodetic enu_to_geodetic(const GeoOrigin& origin, const EnuPoint& p) {
  check_conversion_domain(origin);
  const double lat = origin.latitude + rad_to_deg(p.north / kEarthRadius);
  double lon = origin.longitude +
               rad_to_deg(p.east / (kEarthRadius * std::cos(deg_to_rad(origin.latitude))));
  if (lon > 180.0 || lon < -180.0) lon = wrap_longitude(lon);
  return {lat, lon, origin.altitude + p.up};
}

EnuPoint geodetic_to_enu(const GeoOrigin& origin, const Geodetic& g) {
  check_conversion_domain(origin);
  double dlon = g.longitude - origin.longitude;
  if (dlon > 180.0 || dlon < -180.0) dlon = wrap_longitude(dlon);
  return {deg_to_rad(dlon) * kEarthRadius * std::cos(deg_to_rad(origin.latitude)),
          deg_to_rad(g.latitude - origin.latitude) * kEarthRadius, g.altitude - origin.altitude};
}

CameraAxes camera_axes(const Pose& pose) {
  const double sy = sin_deg(pose.yaw);
  const double cy = cos_deg(pose.yaw);
  const double sp = sin_deg(pose.gimbal_pitch);
  const double cp = cos_deg(pose.gimbal_pitch);
  const EnuPoint forward{sy * cp, cy * cp, -sp};
  const EnuPoint right{cy, -sy, 0.0};
  return {forward, right, cross(right, forward)};
}

bool point_in_frustum(const Pose& pose, const CameraIntrinsics& camera, const EnuPoint& target) {
  if (target == pose.position)
    throw InvalidArgument("frustum target coincides with the camera position", "target");
  const EnuPoint d = target - pose.position;
  const CameraAxes axes = camera_axes(pose);
  const double z = dot(d, axes.forward);
  if (!(z > 0.0)) return false;
  const double x = dot(d, axes.right);
  const double y = dot(d, axes.up);
  // Pinhole bounds: |x/z| <= tan(half fov) = SS / (2 FL) on each axis.
  return std::abs(x) * 2.0 * camera.focal_length() <= z * camera.sensor_width() &&
         std::abs(y) * 2.0 * camera.focal_length() <= z * camera.sensor_height();
}

}  // namespace dronecine::geometry
