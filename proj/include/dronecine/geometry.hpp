#pragma once

#include <cmath>
#include <compare>

namespace dronecine::geometry {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadius = 6378137.0;  // metres, spherical model

/// Local east-north-up point (or vector), metres, z up.
struct EnuPoint {
  double east = 0.0;
  double north = 0.0;
  double up = 0.0;

  friend bool operator==(const EnuPoint&, const EnuPoint&) = default;

  EnuPoint& operator+=(const EnuPoint& o) {
    east += o.east;
    north += o.north;
    up += o.up;
    return *this;
  }
  EnuPoint& operator-=(const EnuPoint& o) {
    east -= o.east;
    north -= o.north;
    up -= o.up;
    return *this;
  }
  friend EnuPoint operator+(EnuPoint a, const EnuPoint& b) { return a += b; }
  friend EnuPoint operator-(EnuPoint a, const EnuPoint& b) { return a -= b; }
  friend EnuPoint operator*(double s, const EnuPoint& a) {
    return {s * a.east, s * a.north, s * a.up};
  }
  friend EnuPoint operator*(const EnuPoint& a, double s) { return s * a; }
};

inline double dot(const EnuPoint& a, const EnuPoint& b) {
  return a.east * b.east + a.north * b.north + a.up * b.up;
}
inline EnuPoint cross(const EnuPoint& a, const EnuPoint& b) {
  return {a.north * b.up - a.up * b.north, a.up * b.east - a.east * b.up,
          a.east * b.north - a.north * b.east};
}
inline double norm(const EnuPoint& a) { return std::sqrt(dot(a, a)); }
inline double horizontal_norm(const EnuPoint& a) { return std::hypot(a.east, a.north); }
inline double distance(const EnuPoint& a, const EnuPoint& b) { return norm(a - b); }
inline double horizontal_distance(const EnuPoint& a, const EnuPoint& b) {
  return horizontal_norm(a - b);
}
bool is_finite(const EnuPoint& p);

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// Exact at integer multiples of 90 degrees, so axis-aligned headings do not
// leak 6e-17 into the orthogonal component.
double sin_deg(double deg);
double cos_deg(double deg);

/// Wraps any angle into [0, 360).
double normalize_yaw(double deg);

/// Bearing of a horizontal direction, degrees clockwise from north, [0, 360).
double bearing_deg(double east, double north);

/// Unit horizontal vector for a bearing measured clockwise from north.
EnuPoint heading_vector(double bearing);

/// Pinhole camera intrinsics. Construction enforces landscape orientation.
class CameraIntrinsics {
 public:
  CameraIntrinsics(double sensor_width_mm, double sensor_height_mm, double focal_length_mm);

  /// 23.66 x 13.3 mm sensor behind a 35 mm lens.
  static CameraIntrinsics reference();

  double sensor_width() const { return sensor_width_; }
  double sensor_height() const { return sensor_height_; }
  double focal_length() const { return focal_length_; }

  /// Angular half field of view along the long (horizontal) image axis, radians.
  double half_fov_horizontal() const;
  double half_fov_vertical() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

 private:
  double sensor_width_;
  double sensor_height_;
  double focal_length_;
};

class ReferenceSetup {
 public:
  ReferenceSetup() : ReferenceSetup(CameraIntrinsics::reference(), 20.0) {}
  ReferenceSetup(CameraIntrinsics camera, double working_distance);

  const CameraIntrinsics& camera() const { return camera_; }
  double working_distance() const { return working_distance_; }

 private:
  CameraIntrinsics camera_;
  double working_distance_;
};

struct GeoOrigin {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;  // metres above mean sea level

  friend bool operator==(const GeoOrigin&, const GeoOrigin&) = default;
};
void validate(const GeoOrigin& origin);

struct Geodetic {
  double latitude;
  double longitude;
  double altitude;
};

/// Camera/vehicle pose. yaw is clockwise from north in [0, 360); gimbal pitch
/// is measured below the horizon (90 = nadir) and lies in [-30, 90].
struct Pose {
  EnuPoint position;
  double yaw = 0.0;
  double gimbal_pitch = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

inline constexpr double kMinGimbalPitch = -30.0;
inline constexpr double kMaxGimbalPitch = 90.0;

/// Normalizes yaw into [0, 360) and rejects out-of-range pitch or non-finite input.
Pose make_pose(const EnuPoint& position, double yaw, double gimbal_pitch);
void validate(const Pose& pose);

struct GroundFootprint {
  double in_track_extent;
  double cross_track_extent;
};

enum class FootprintAxis { in_track, cross_track };

// Linear ground coverage of one exposure at the given working distance. The
// long sensor side spans the cross-track axis.
GroundFootprint ground_footprint(const CameraIntrinsics& camera, double working_distance);

// Working distance that reproduces the reference footprint on `axis` with the
// actual camera.
double scale_working_distance(const ReferenceSetup& ref, const CameraIntrinsics& actual,
                              FootprintAxis axis);

Geodetic enu_to_geodetic(const GeoOrigin& origin, const EnuPoint& p);
EnuPoint geodetic_to_enu(const GeoOrigin& origin, const Geodetic& g);

struct CameraAxes {
  EnuPoint forward;  // optical axis
  EnuPoint right;    // image x, spans the sensor width
  EnuPoint up;       // image y, spans the sensor height
};
CameraAxes camera_axes(const Pose& pose);

bool point_in_frustum(const Pose& pose, const CameraIntrinsics& camera, const EnuPoint& target);

}  // namespace dronecine::geometry
