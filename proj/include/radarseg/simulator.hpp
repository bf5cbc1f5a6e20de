// Synthetic scene generator: produces labeled radar return streams that
// replicate the field campaign's statistics (per-class detection coverage,
// RCS distributions, doppler from relative motion, bursty return rates).
//
// The detection coverage of a target class is modeled as two elliptic
// bicones: from a vertex at the sensor the envelope opens at the class's
// azimuth/elevation half-angles until the peak-offset range, then closes
// linearly toward zero lateral extent at the maximum detection range.
// in_coverage() maps a sensor-frame position to a detection probability that
// is exactly 1 in the core region, tapers smoothly (cosine) toward the hull,
// and is exactly 0 outside.
//
// Return counts are drawn from an inhomogeneous Poisson process with rate
// profile.return_rate_hz * in_coverage(...). A recipe with a fixed seed
// produces a byte-for-byte identical stream on every run. One generator owns
// the recipe's RNG; run distinct recipes in parallel, not one recipe from
// several threads.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radarseg/geometry.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/returns.hpp"

namespace radarseg {

struct DetectionCoverage {
    double max_range_m = 0.0;
    double azimuth_half_angle = 0.0;    ///< rad, opening half-angle at the vertex
    double elevation_half_angle = 0.0;  ///< rad
    double peak_offset_range_m = 0.0;   ///< range of maximum angular extent
    double near_field_taper = 1.0;      ///< detection probability at zero range, in [0,1]
};

/// Detection probability of a sensor-frame position, per the bicone model.
double in_coverage(const DetectionCoverage& coverage, const LocalPosition& relative_position);

struct TargetProfile {
    TargetSpec spec;
    DetectionCoverage coverage;
    double rcs_mean_dbsm = 0.0;
    double rcs_spread_dbsm = 0.0;
    double return_rate_hz = 0.0;  ///< at full coverage
    double max_speed_mps = 0.0;
};

/// Calibrated default profiles: M300 sensed out to 90 m with a 30 deg
/// azimuth / 10 deg elevation half-angle, Mini below 40 m and near-coplanar
/// in elevation, Airplane large and detectable to 350 m.
TargetProfile default_profile(ClassLabel cls);

enum class PatternTag { Zigzag, Radial, Circuit, Manual };

PatternTag pattern_from_name(const std::string& name);
const char* pattern_name(PatternTag tag);

struct Waypoint {
    double t = 0.0;
    LocalPosition position;
};

/// Piecewise-linear trajectory. Before the first waypoint and after the last
/// one, the actor holds position (zero velocity).
struct Mission {
    PatternTag pattern = PatternTag::Manual;
    std::vector<Waypoint> waypoints;
};

LocalPosition mission_position_at(const Mission& m, double t);
LocalPosition mission_velocity_at(const Mission& m, double t);
double mission_max_speed(const Mission& m);

struct YawKey {
    double t = 0.0;
    double yaw = 0.0;  ///< rad, normalized
};

struct SensorPlan {
    Mission trajectory;
    std::vector<YawKey> yaw_schedule;  ///< shortest-arc interpolated; empty = yaw 0
    double fov_horizontal = deg2rad(120.0);
    double fov_vertical = deg2rad(25.0);
    SensorErrorModel noise;  ///< measurement noise sigmas (slack term unused here)
};

struct GroundModel {
    bool enabled = false;
    double rate_hz = 0.0;       ///< when the FoV intersects the ground plane
    double max_range_m = 150.0;
    double rcs_mean_dbsm = -6.0;
    double rcs_spread_dbsm = 5.0;
    double z_sigma_m = 0.35;  ///< terrain roughness
};

/// Axis-aligned static structure emitting returns when inside the FoV.
struct InfraBox {
    LocalPosition min_corner;
    LocalPosition max_corner;
    double rate_hz = 0.0;
    double max_range_m = 120.0;
    double rcs_mean_dbsm = 2.0;
    double rcs_spread_dbsm = 6.0;
};

struct Actor {
    TargetProfile profile;
    Mission mission;
};

struct SceneRecipe {
    double duration_s = 0.0;
    std::uint64_t seed = 0;
    GeodeticPosition station;
    SensorPlan sensor;
    std::vector<Actor> actors;
    GroundModel ground;
    std::vector<InfraBox> infrastructure;
};

/// Throws ConfigError on non-positive duration, non-increasing waypoint
/// times, or mission legs faster than the actor's maximum speed.
void validate_recipe(const SceneRecipe& recipe);

Pose sensor_pose_at(const SceneRecipe& recipe, double t);
LocalPosition sensor_velocity_at(const SceneRecipe& recipe, double t);

/// Radial relative velocity along a unit line-of-sight vector:
/// dot(target_velocity - sensor_velocity, line_of_sight). Negative = closing.
/// Throws ConfigError unless |line_of_sight| = 1 +- 1e-9.
double doppler_of(const LocalPosition& target_velocity, const LocalPosition& sensor_velocity,
                  const LocalPosition& line_of_sight);

/// Generates the labeled return stream, sorted by timestamp. Deterministic
/// for a fixed recipe seed.
std::vector<RadarReturn> simulate(const SceneRecipe& recipe);

/// Per-actor GPS tracks resampled at `rate_hz`, for the labeling pipeline.
std::vector<TargetTrack> actor_tracks(const SceneRecipe& recipe, double rate_hz = 10.0);

/// Sensor pose samples at `rate_hz` (time, pose) for the labeling pipeline.
std::vector<std::pair<double, Pose>> sensor_pose_track(const SceneRecipe& recipe,
                                                       double rate_hz = 10.0);

// Mission builders used by the bundled recipes and tests. All of them append
// to a time cursor and return the completed mission.

/// Hold `position` over [t0, t1].
Mission hover_mission(const LocalPosition& position, double t0, double t1);

/// Lateral sweeps of x in [-half_width, half_width] at successive y distances
/// y_start, y_start+y_step, ..., <= y_end, at constant speed. `hover_s` adds a
/// stationary dwell at every turn. z cycles through `altitudes`.
Mission zigzag_mission(double t0, double speed, double half_width, double y_start, double y_end,
                       double y_step, const std::vector<double>& altitudes, double hover_s = 0.0);

/// Out-and-back legs between r_min and r_max along the given bearings
/// (radians from +y), all at altitude z.
Mission radial_mission(double t0, double speed, double r_min, double r_max,
                       const std::vector<double>& bearings, double z);

/// Straight crossing passes (airplane circuit legs): each pass flies from
/// `from` to `to` at `speed`, then teleports wait time `gap_s` before the
/// next pass flies the reversed leg offset by `lateral_step`.
Mission circuit_mission(double t0, double speed, const LocalPosition& from, const LocalPosition& to,
                        int passes, double gap_s, double lateral_step);

/// Built-in recipes: "smoke" (fast, for tests), "campaign" (the default
/// acceptance-scale scene, ~2000 frames), "campaign-full" (the 2-hour
/// equivalent with idle high-altitude segments between active blocks).
SceneRecipe builtin_recipe(const std::string& name, std::uint64_t seed);

bool is_builtin_recipe(const std::string& name);

}  // namespace radarseg
