// Coordinate frames and conversions: geodetic -> local ENU tangent plane,
// polar <-> cartesian in the sensor frame, and sensor frame <-> world frame
// with a yaw-only attitude correction.
//
// Conventions (all angles in radians internally):
//   sensor frame   x right, y forward (boresight), z up
//   world frame    x east, y north, z up, origin at the ground station
//   yaw psi        compass-style: 0 = boresight along +y (north), positive
//                  yaw rotates the boresight toward +x (east)
//
// All functions here are pure over value types and safe to call concurrently.
#pragma once

#include <cmath>

#include "radarseg/common.hpp"

namespace radarseg {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

/// Earth radius used for the flat-earth tangent plane (WGS84 equatorial).
/// All scenes span < 1 km around the station, where the flat-earth error is
/// sub-centimeter; full ECEF geodesy is a non-goal.
inline constexpr double kEarthRadiusM = 6378137.0;

/// Normalize an angle to (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

struct GeodeticPosition {
    double lat_deg = 0.0;  ///< [-90, 90]
    double lon_deg = 0.0;  ///< [-180, 180]
    double alt_m = 0.0;
};

/// East-north-up offsets in meters relative to the ground station.
struct LocalPosition {
    double x = 0.0;  ///< east
    double y = 0.0;  ///< north
    double z = 0.0;  ///< up
};

inline LocalPosition operator+(LocalPosition a, LocalPosition b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline LocalPosition operator-(LocalPosition a, LocalPosition b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline LocalPosition operator*(LocalPosition a, double s) {
    return {a.x * s, a.y * s, a.z * s};
}
inline double dot(LocalPosition a, LocalPosition b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(LocalPosition a) { return std::sqrt(dot(a, a)); }
inline double distance(LocalPosition a, LocalPosition b) { return norm(a - b); }

/// Position and yaw of the sensor-equipped platform.
struct Pose {
    LocalPosition position;
    double yaw = 0.0;  ///< radians, normalized to (-pi, pi]
};

/// One radar detection in sensor-relative polar coordinates.
struct PolarReturn {
    double range = 0.0;      ///< meters, >= 0
    double azimuth = 0.0;    ///< radians, positive to the right
    double elevation = 0.0;  ///< radians, positive up
};

/// Flat-earth ENU offset of `p` from `station`. The station maps to the
/// origin exactly. Throws ConfigError for out-of-range latitude/longitude.
LocalPosition geodetic_to_local(const GeodeticPosition& p, const GeodeticPosition& station);

/// Inverse of geodetic_to_local (same tangent-plane approximation).
GeodeticPosition local_to_geodetic(const LocalPosition& p, const GeodeticPosition& station);

/// Spherical-to-cartesian in the sensor frame:
///   x = R sin(az) cos(el), y = R cos(az) cos(el), z = R sin(el).
/// Round-trips with cartesian_to_polar to 1e-9 m.
LocalPosition polar_to_cartesian(const PolarReturn& r);

/// Inverse of polar_to_cartesian. The origin maps to (R=0, az=0, el=0).
PolarReturn cartesian_to_polar(const LocalPosition& p);

/// World-frame position of a polar return seen from `sensor_pose`: converts
/// to sensor-frame cartesian, rotates the horizontal components by yaw and
/// translates by the sensor position. Elevation alone drives the vertical
/// axis: z = z_s + R sin(el).
LocalPosition sensor_to_world(const PolarReturn& r, const Pose& sensor_pose);

/// Inverse rigid transform of sensor_to_world (cartesian in, cartesian out).
LocalPosition world_to_sensor(const LocalPosition& world, const Pose& sensor_pose);

/// sensor_to_world for an already-converted cartesian point.
LocalPosition sensor_cart_to_world(const LocalPosition& sensor_cart, const Pose& sensor_pose);

}  // namespace radarseg
