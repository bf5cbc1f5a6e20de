#include "radarseg/labeling.hpp"

#include <algorithm>
#include <cmath>

namespace radarseg {

LocalPosition interpolate_track(const TargetTrack& track, double t) {
    const auto& f = track.fixes;
    if (f.size() < 2) throw DataError("track needs at least two fixes");
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (!(f[i].t > f[i - 1].t)) throw DataError("track timestamps not strictly increasing");
    }
    if (t < f.front().t || t > f.back().t) {
        throw DataError("timestamp outside track span; extrapolation not supported");
    }
    auto it = std::lower_bound(f.begin(), f.end(), t,
                               [](const TrackFix& a, double v) { return a.t < v; });
    if (it == f.begin()) return it->position;
    const TrackFix& hi = *it;
    const TrackFix& lo = *(it - 1);
    if (hi.t == t) return hi.position;
    const double u = (t - lo.t) / (hi.t - lo.t);
    return lo.position + (hi.position - lo.position) * u;
}

bool track_covers(const TargetTrack& track, double t) {
    return !track.fixes.empty() && t >= track.fixes.front().t && t <= track.fixes.back().t;
}

double match_threshold(const TargetSpec& spec, double range_m, const SensorErrorModel& err) {
    const double a = spec.length_m / 2.0 + err.range_err_m;
    const double b = spec.width_m / 2.0 + range_m * std::sin(err.azimuth_err_rad);
    const double c = spec.height_m / 2.0 + range_m * std::sin(err.elevation_err_rad);
    return std::sqrt(a * a + b * b + c * c) + err.slack_m;
}

LabelMatch label_return_detailed(const RadarReturn& ret, const Pose& sensor_pose,
                                 std::span<const TargetTrack> tracks, const SensorErrorModel& err) {
    LabelMatch best;
    const LocalPosition world = sensor_to_world(ret.polar, sensor_pose);
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const TargetTrack& track = tracks[i];
        if (!track_covers(track, ret.t)) continue;
        const LocalPosition target = interpolate_track(track, ret.t);
        const double d = distance(world, target);
        if (d < match_threshold(track.spec, ret.polar.range, err)) {
            if (!best.label || d < best.distance_m) {
                best.label = track.spec.cls;
                best.distance_m = d;
                best.track_index = static_cast<int>(i);
            }
        }
    }
    return best;
}

std::optional<ClassLabel> label_return(const RadarReturn& ret, const Pose& sensor_pose,
                                       std::span<const TargetTrack> tracks,
                                       const SensorErrorModel& err) {
    return label_return_detailed(ret, sensor_pose, tracks, err).label;
}

bool point_in_polygon(const std::vector<std::array<double, 2>>& poly, double x, double y) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = poly[i][0], yi = poly[i][1];
        const double xj = poly[j][0], yj = poly[j][1];
        if ((yi > y) != (yj > y)) {
            const double x_cross = xi + (y - yi) / (yj - yi) * (xj - xi);
            if (x < x_cross) inside = !inside;
        }
    }
    return inside;
}

void label_corridor(std::span<RadarReturn> returns, std::span<const Pose> sensor_poses,
                    const Corridor& corridor, ClassLabel cls) {
    if (corridor.polygon.size() < 3) throw ConfigError("corridor polygon needs >= 3 vertices");
    if (returns.size() != sensor_poses.size()) {
        throw DataError("label_corridor: one sensor pose per return required");
    }
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const LocalPosition world = sensor_to_world(returns[i].polar, sensor_poses[i]);
        if (world.z < corridor.z_min || world.z > corridor.z_max) continue;
        if (point_in_polygon(corridor.polygon, world.x, world.y)) returns[i].label = cls;
    }
}

}  // namespace radarseg
