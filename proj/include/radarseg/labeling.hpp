// Automatic per-return labeling from synchronized target GPS tracks, plus
// corridor-based labeling for airplane returns.
//
// A return matches a target when the euclidean distance between its
// world-frame position and the target's interpolated position is below a
// size- and error-dependent threshold:
//
//   distance < sqrt((l/2 + Re)^2 + (w/2 + R*sin(ae))^2 + (h/2 + R*sin(be))^2) + slack
//
// With several matching tracks the nearest one wins. Unmatched returns are
// left for the caller to resolve (scene rules decide between ground and
// infrastructure); this module never guesses.
//
// Labeling is pure given immutable tracks; callers may parallelize over
// returns.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "radarseg/geometry.hpp"
#include "radarseg/returns.hpp"

namespace radarseg {

/// Physical extent of a trackable target, in meters.
struct TargetSpec {
    ClassLabel cls = ClassLabel::M300;
    double width_m = 0.0;
    double length_m = 0.0;
    double height_m = 0.0;
};

/// Sensor measurement error envelope used by the matching threshold, plus the
/// empirical slack term covering time shifts and mount vibration.
struct SensorErrorModel {
    double range_err_m = 0.5;
    double azimuth_err_rad = deg2rad(1.0);
    double elevation_err_rad = deg2rad(1.0);
    double slack_m = 1.5;
};

struct TrackFix {
    double t = 0.0;
    LocalPosition position;
};

/// Time-ordered GPS fixes of one target. Timestamps must be strictly
/// increasing; interpolate_track verifies this lazily.
struct TargetTrack {
    TargetSpec spec;
    std::vector<TrackFix> fixes;
};

/// Linear interpolation between the bracketing fixes. Throws DataError if `t`
/// lies outside the track span or the track is not strictly increasing.
LocalPosition interpolate_track(const TargetTrack& track, double t);

/// True if `t` lies within the track's timestamp span.
bool track_covers(const TargetTrack& track, double t);

/// Matching threshold (right-hand side of the distance inequality) for a
/// target of the given dimensions observed at range `range_m`.
double match_threshold(const TargetSpec& spec, double range_m, const SensorErrorModel& err);

struct LabelMatch {
    std::optional<ClassLabel> label;  ///< empty = unmatched
    double distance_m = 0.0;          ///< distance to the matched track
    int track_index = -1;
};

/// Labels one return against all tracks that cover its timestamp. Returns the
/// nearest matching track's class, or an empty optional when no track
/// matches (or the track list is empty).
LabelMatch label_return_detailed(const RadarReturn& ret, const Pose& sensor_pose,
                                 std::span<const TargetTrack> tracks, const SensorErrorModel& err);

std::optional<ClassLabel> label_return(const RadarReturn& ret, const Pose& sensor_pose,
                                       std::span<const TargetTrack> tracks,
                                       const SensorErrorModel& err);

/// Horizontal polygon footprint with an altitude band, in world coordinates.
struct Corridor {
    std::vector<std::array<double, 2>> polygon;  ///< (x, y) vertices, simple polygon
    double z_min = -1e9;
    double z_max = 1e9;
};

/// Even-odd (crossing number) point-in-polygon test.
bool point_in_polygon(const std::vector<std::array<double, 2>>& polygon, double x, double y);

/// Assigns `cls` to every return whose world-frame position falls inside the
/// corridor footprint and altitude band; other returns are untouched.
/// `sensor_poses[i]` is the pose at returns[i]'s timestamp. Throws
/// ConfigError for degenerate polygons (< 3 vertices).
void label_corridor(std::span<RadarReturn> returns, std::span<const Pose> sensor_poses,
                    const Corridor& corridor, ClassLabel cls);

}  // namespace radarseg
