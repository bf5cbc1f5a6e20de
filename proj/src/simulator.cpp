#include "radarseg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace radarseg {

namespace {

constexpr double kStepS = 0.01;  // simulation step

double cosine_taper(double s) {
    // 1 at s=0, 0 at s=1, smooth in between.
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * s));
}

}  // namespace

double in_coverage(const DetectionCoverage& cov, const LocalPosition& rel) {
    const double range = norm(rel);
    if (range >= cov.max_range_m) return 0.0;
    if (rel.y <= 0.0 && range > 1e-9) return 0.0;  // behind the sensor plane

    // Radial factors: optional near-field ramp, cosine roll-off near max range.
    double f_near = 1.0;
    if (range < cov.peak_offset_range_m) {
        const double u = range / cov.peak_offset_range_m;
        f_near = cov.near_field_taper + (1.0 - cov.near_field_taper) * u;
    }
    const double far_start = 0.85 * cov.max_range_m;
    double f_far = 1.0;
    if (range > far_start) {
        f_far = cosine_taper((range - far_start) / (cov.max_range_m - far_start));
    }

    if (range <= 1e-9) return f_near;

    // Angular hull at this range: half-extents stay at the opening angles out
    // to the peak-offset range, then the lateral extent closes linearly
    // toward zero at max range.
    double az_half = cov.azimuth_half_angle;
    double el_half = cov.elevation_half_angle;
    if (range > cov.peak_offset_range_m) {
        const double closing = (cov.max_range_m - range) /
                               (cov.max_range_m - cov.peak_offset_range_m);
        az_half = std::atan(std::tan(cov.azimuth_half_angle) * cov.peak_offset_range_m * closing / range);
        el_half = std::atan(std::tan(cov.elevation_half_angle) * cov.peak_offset_range_m * closing / range);
    }
    if (az_half <= 0.0 || el_half <= 0.0) return 0.0;

    const PolarReturn p = cartesian_to_polar(rel);
    const double ea = std::tan(p.azimuth) / std::tan(az_half);
    const double ee = std::tan(p.elevation) / std::tan(el_half);
    if (std::abs(p.azimuth) >= az_half || std::abs(p.elevation) >= el_half) return 0.0;
    const double s = std::sqrt(ea * ea + ee * ee);
    if (s >= 1.0) return 0.0;

    constexpr double kCore = 0.5;  // elliptical core fraction with probability 1
    const double f_ang = s <= kCore ? 1.0 : cosine_taper((s - kCore) / (1.0 - kCore));
    return f_near * f_far * f_ang;
}

TargetProfile default_profile(ClassLabel cls) {
    TargetProfile p;
    p.spec.cls = cls;
    switch (cls) {
    case ClassLabel::M300:
        p.spec = {cls, 0.81, 0.67, 0.43};
        p.coverage = {90.0, deg2rad(30.0), deg2rad(10.0), 40.0, 0.9};
        p.rcs_mean_dbsm = -4.0;
        p.rcs_spread_dbsm = 4.5;
        p.return_rate_hz = 160.0;
        p.max_speed_mps = 23.0;
        break;
    case ClassLabel::Mini:
        p.spec = {cls, 0.245, 0.289, 0.056};
        p.coverage = {40.0, deg2rad(15.0), deg2rad(3.0), 18.0, 0.9};
        p.rcs_mean_dbsm = -10.0;
        p.rcs_spread_dbsm = 4.5;
        p.return_rate_hz = 18.0;
        p.max_speed_mps = 16.0;
        break;
    case ClassLabel::Airplane:
        // No measured envelope exists for the airplane; these are placeholder
        // values consistent with a large metallic target.
        p.spec = {cls, 9.45, 6.2, 2.34};
        p.coverage = {350.0, deg2rad(30.0), deg2rad(10.0), 150.0, 1.0};
        p.rcs_mean_dbsm = 11.0;
        p.rcs_spread_dbsm = 5.0;
        p.return_rate_hz = 28.0;
        p.max_speed_mps = 48.7;
        break;
    default:
        throw ConfigError("no default profile for class " + std::string(class_name(cls)));
    }
    return p;
}

PatternTag pattern_from_name(const std::string& name) {
    if (name == "zigzag") return PatternTag::Zigzag;
    if (name == "radial") return PatternTag::Radial;
    if (name == "circuit") return PatternTag::Circuit;
    if (name == "manual") return PatternTag::Manual;
    throw ConfigError("unknown mission pattern: " + name);
}

const char* pattern_name(PatternTag tag) {
    switch (tag) {
    case PatternTag::Zigzag: return "zigzag";
    case PatternTag::Radial: return "radial";
    case PatternTag::Circuit: return "circuit";
    case PatternTag::Manual: return "manual";
    }
    return "?";
}

LocalPosition mission_position_at(const Mission& m, double t) {
    const auto& w = m.waypoints;
    if (w.empty()) return {};
    if (t <= w.front().t) return w.front().position;
    if (t >= w.back().t) return w.back().position;
    auto it = std::lower_bound(w.begin(), w.end(), t,
                               [](const Waypoint& a, double v) { return a.t < v; });
    const Waypoint& hi = *it;
    const Waypoint& lo = *(it - 1);
    if (hi.t == t) return hi.position;
    const double u = (t - lo.t) / (hi.t - lo.t);
    return lo.position + (hi.position - lo.position) * u;
}

LocalPosition mission_velocity_at(const Mission& m, double t) {
    const auto& w = m.waypoints;
    if (w.size() < 2 || t < w.front().t || t >= w.back().t) return {};
    auto it = std::upper_bound(w.begin(), w.end(), t,
                               [](double v, const Waypoint& a) { return v < a.t; });
    const Waypoint& hi = *it;
    const Waypoint& lo = *(it - 1);
    const double dt = hi.t - lo.t;
    if (dt <= 0.0) return {};
    return (hi.position - lo.position) * (1.0 / dt);
}

double mission_max_speed(const Mission& m) {
    double vmax = 0.0;
    for (std::size_t i = 1; i < m.waypoints.size(); ++i) {
        const double dt = m.waypoints[i].t - m.waypoints[i - 1].t;
        if (dt <= 0.0) continue;
        vmax = std::max(vmax, distance(m.waypoints[i].position, m.waypoints[i - 1].position) / dt);
    }
    return vmax;
}

void validate_recipe(const SceneRecipe& recipe) {
    if (recipe.duration_s < 0.0) throw ConfigError("recipe duration must not be negative");
    auto check_times = [](const std::vector<Waypoint>& w, const std::string& who) {
        for (std::size_t i = 1; i < w.size(); ++i) {
            if (!(w[i].t > w[i - 1].t)) throw ConfigError(who + ": waypoint times must increase");
        }
    };
    check_times(recipe.sensor.trajectory.waypoints, "sensor");
    for (std::size_t i = 0; i < recipe.actors.size(); ++i) {
        const Actor& a = recipe.actors[i];
        check_times(a.mission.waypoints, "actor " + std::to_string(i));
        const double v = mission_max_speed(a.mission);
        if (v > a.profile.max_speed_mps * 1.001) {
            throw ConfigError("actor " + std::to_string(i) + " (" + class_name(a.profile.spec.cls) +
                              ") mission speed " + std::to_string(v) + " m/s exceeds max " +
                              std::to_string(a.profile.max_speed_mps));
        }
    }
    for (const auto& box : recipe.infrastructure) {
        if (box.max_corner.x <= box.min_corner.x || box.max_corner.y <= box.min_corner.y ||
            box.max_corner.z <= box.min_corner.z) {
            throw ConfigError("infrastructure box has non-positive extent");
        }
    }
}

namespace {

double yaw_at(const std::vector<YawKey>& keys, double t) {
    if (keys.empty()) return 0.0;
    if (t <= keys.front().t) return keys.front().yaw;
    if (t >= keys.back().t) return keys.back().yaw;
    auto it = std::lower_bound(keys.begin(), keys.end(), t,
                               [](const YawKey& a, double v) { return a.t < v; });
    const YawKey& hi = *it;
    const YawKey& lo = *(it - 1);
    if (hi.t == t) return hi.yaw;
    const double u = (t - lo.t) / (hi.t - lo.t);
    // Shortest-arc interpolation across the +-pi boundary.
    const double delta = normalize_angle(hi.yaw - lo.yaw);
    return normalize_angle(lo.yaw + delta * u);
}

}  // namespace

Pose sensor_pose_at(const SceneRecipe& recipe, double t) {
    return {mission_position_at(recipe.sensor.trajectory, t), yaw_at(recipe.sensor.yaw_schedule, t)};
}

LocalPosition sensor_velocity_at(const SceneRecipe& recipe, double t) {
    return mission_velocity_at(recipe.sensor.trajectory, t);
}

double doppler_of(const LocalPosition& target_velocity, const LocalPosition& sensor_velocity,
                  const LocalPosition& line_of_sight) {
    const double n = norm(line_of_sight);
    if (std::abs(n - 1.0) > 1e-9) {
        throw ConfigError("doppler_of: line of sight must be a unit vector");
    }
    return dot(target_velocity - sensor_velocity, line_of_sight);
}

namespace {

struct Emitter {
    const SceneRecipe& recipe;
    std::mt19937_64& rng;
    std::vector<RadarReturn>& out;

    bool in_fov(const PolarReturn& p) const {
        return std::abs(p.azimuth) <= recipe.sensor.fov_horizontal / 2.0 &&
               std::abs(p.elevation) <= recipe.sensor.fov_vertical / 2.0;
    }

    // Emits one return for a world-space scatter point, applying polar
    // measurement noise. Doppler comes from the true relative velocity along
    // the true line of sight (static world + hovering sensor stays exactly 0).
    void emit(double t_step, const Pose& pose, const LocalPosition& sensor_vel,
              const LocalPosition& scatter_w, const LocalPosition& vel_w, double rcs_mean,
              double rcs_spread, ClassLabel label) {
        const LocalPosition rel = world_to_sensor(scatter_w, pose);
        PolarReturn truth = cartesian_to_polar(rel);
        if (truth.range < 1e-6 || !in_fov(truth)) return;

        const SensorErrorModel& noise = recipe.sensor.noise;
        std::normal_distribution<double> nr(0.0, noise.range_err_m);
        std::normal_distribution<double> na(0.0, noise.azimuth_err_rad);
        std::normal_distribution<double> ne(0.0, noise.elevation_err_rad);
        PolarReturn meas;
        meas.range = std::max(0.01, truth.range + (noise.range_err_m > 0 ? nr(rng) : 0.0));
        meas.azimuth = truth.azimuth + (noise.azimuth_err_rad > 0 ? na(rng) : 0.0);
        meas.elevation = truth.elevation + (noise.elevation_err_rad > 0 ? ne(rng) : 0.0);

        double dop = 0.0;
        const LocalPosition los_w = scatter_w - pose.position;
        const double los_n = norm(los_w);
        if (los_n > 1e-9) dop = doppler_of(vel_w, sensor_vel, los_w * (1.0 / los_n));

        std::normal_distribution<double> nrcs(rcs_mean, rcs_spread);
        std::uniform_real_distribution<double> jitter(0.0, kStepS);

        RadarReturn r;
        r.t = t_step + jitter(rng);
        r.polar = meas;
        r.cartesian = polar_to_cartesian(meas);
        r.doppler = dop;
        r.rcs = nrcs(rng);
        r.label = label;
        out.push_back(r);
    }
};

int poisson_count(std::mt19937_64& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    std::poisson_distribution<int> d(lambda);
    return d(rng);
}

}  // namespace

std::vector<RadarReturn> simulate(const SceneRecipe& recipe) {
    validate_recipe(recipe);
    std::mt19937_64 rng(recipe.seed);
    std::vector<RadarReturn> out;
    Emitter emitter{recipe, rng, out};

    const double half_v = recipe.sensor.fov_vertical / 2.0;
    const double half_h = recipe.sensor.fov_horizontal / 2.0;

    for (double t = 0.0; t < recipe.duration_s; t += kStepS) {
        const Pose pose = sensor_pose_at(recipe, t);
        const LocalPosition sensor_vel = sensor_velocity_at(recipe, t);

        for (const Actor& actor : recipe.actors) {
            const LocalPosition pos_w = mission_position_at(actor.mission, t);
            const LocalPosition rel = world_to_sensor(pos_w, pose);
            const double p = in_coverage(actor.profile.coverage, rel);
            if (p <= 0.0) continue;
            const int count = poisson_count(rng, actor.profile.return_rate_hz * p * kStepS);
            if (count == 0) continue;
            const LocalPosition vel_w = mission_velocity_at(actor.mission, t);
            const TargetSpec& spec = actor.profile.spec;
            std::uniform_real_distribution<double> ox(-spec.width_m / 2.0, spec.width_m / 2.0);
            std::uniform_real_distribution<double> oy(-spec.length_m / 2.0, spec.length_m / 2.0);
            std::uniform_real_distribution<double> oz(-spec.height_m / 2.0, spec.height_m / 2.0);
            for (int i = 0; i < count; ++i) {
                const LocalPosition scatter = pos_w + LocalPosition{ox(rng), oy(rng), oz(rng)};
                emitter.emit(t, pose, sensor_vel, scatter, vel_w, actor.profile.rcs_mean_dbsm,
                             actor.profile.rcs_spread_dbsm, spec.cls);
            }
        }

        if (recipe.ground.enabled) {
            const double h = pose.position.z;
            if (h > 0.5) {
                // Horizontal-distance band where the ground plane is inside
                // the vertical FoV and detection range.
                const double d_min = h / std::tan(half_v);
                const double d_sq = recipe.ground.max_range_m * recipe.ground.max_range_m - h * h;
                const double d_max = d_sq > 0.0 ? std::sqrt(d_sq) : 0.0;
                if (d_min < d_max) {
                    const int count = poisson_count(rng, recipe.ground.rate_hz * kStepS);
                    std::uniform_real_distribution<double> uaz(-half_h, half_h);
                    std::uniform_real_distribution<double> ud(d_min, d_max);
                    std::normal_distribution<double> uz(0.0, recipe.ground.z_sigma_m);
                    for (int i = 0; i < count; ++i) {
                        const double bearing = pose.yaw + uaz(rng);
                        const double d = ud(rng);
                        const LocalPosition scatter{pose.position.x + std::sin(bearing) * d,
                                                    pose.position.y + std::cos(bearing) * d,
                                                    uz(rng)};
                        emitter.emit(t, pose, sensor_vel, scatter, {}, recipe.ground.rcs_mean_dbsm,
                                     recipe.ground.rcs_spread_dbsm, ClassLabel::Ground);
                    }
                }
            }
        }

        for (const InfraBox& box : recipe.infrastructure) {
            const int count = poisson_count(rng, box.rate_hz * kStepS);
            if (count == 0) continue;
            std::uniform_real_distribution<double> ux(box.min_corner.x, box.max_corner.x);
            std::uniform_real_distribution<double> uy(box.min_corner.y, box.max_corner.y);
            std::uniform_real_distribution<double> uz(box.min_corner.z, box.max_corner.z);
            for (int i = 0; i < count; ++i) {
                // Rejection against FoV and range happens inside emit(); out
                // of view parts of the box simply emit nothing.
                const LocalPosition scatter{ux(rng), uy(rng), uz(rng)};
                const double range = distance(scatter, pose.position);
                if (range > box.max_range_m) continue;
                emitter.emit(t, pose, sensor_vel, scatter, {}, box.rcs_mean_dbsm,
                             box.rcs_spread_dbsm, ClassLabel::Infrastructure);
            }
        }
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const RadarReturn& a, const RadarReturn& b) { return a.t < b.t; });
    return out;
}

std::vector<TargetTrack> actor_tracks(const SceneRecipe& recipe, double rate_hz) {
    std::vector<TargetTrack> tracks;
    const double dt = 1.0 / rate_hz;
    for (const Actor& actor : recipe.actors) {
        TargetTrack track;
        track.spec = actor.profile.spec;
        for (double t = 0.0; t <= recipe.duration_s + 1e-9; t += dt) {
            track.fixes.push_back({t, mission_position_at(actor.mission, t)});
        }
        tracks.push_back(std::move(track));
    }
    return tracks;
}

std::vector<std::pair<double, Pose>> sensor_pose_track(const SceneRecipe& recipe, double rate_hz) {
    std::vector<std::pair<double, Pose>> poses;
    const double dt = 1.0 / rate_hz;
    for (double t = 0.0; t <= recipe.duration_s + 1e-9; t += dt) {
        poses.emplace_back(t, sensor_pose_at(recipe, t));
    }
    return poses;
}

Mission hover_mission(const LocalPosition& position, double t0, double t1) {
    Mission m;
    m.pattern = PatternTag::Manual;
    m.waypoints = {{t0, position}, {t1, position}};
    return m;
}

Mission zigzag_mission(double t0, double speed, double half_width, double y_start, double y_end,
                       double y_step, const std::vector<double>& altitudes, double hover_s) {
    Mission m;
    m.pattern = PatternTag::Zigzag;
    double t = t0;
    double x = -half_width;
    std::size_t alt_i = 0;
    for (double y = y_start; y <= y_end + 1e-9; y += y_step) {
        const double z = altitudes.empty() ? 0.0 : altitudes[alt_i++ % altitudes.size()];
        m.waypoints.push_back({t, {x, y, z}});
        const double x_to = -x;
        t += 2.0 * half_width / speed;
        m.waypoints.push_back({t, {x_to, y, z}});
        if (hover_s > 0.0) {
            t += hover_s;
            m.waypoints.push_back({t, {x_to, y, z}});
        }
        x = x_to;
        if (y + y_step <= y_end + 1e-9) t += y_step / speed;
    }
    return m;
}

Mission radial_mission(double t0, double speed, double r_min, double r_max,
                       const std::vector<double>& bearings, double z) {
    Mission m;
    m.pattern = PatternTag::Radial;
    double t = t0;
    for (std::size_t i = 0; i < bearings.size(); ++i) {
        const double sx = std::sin(bearings[i]), cy = std::cos(bearings[i]);
        const LocalPosition near{sx * r_min, cy * r_min, z};
        const LocalPosition far{sx * r_max, cy * r_max, z};
        if (i == 0) {
            m.waypoints.push_back({t, near});
        } else {
            // transit from previous bearing's near point
            t += distance(m.waypoints.back().position, near) / speed;
            m.waypoints.push_back({t, near});
        }
        t += (r_max - r_min) / speed;
        m.waypoints.push_back({t, far});
        t += (r_max - r_min) / speed;
        m.waypoints.push_back({t, near});
    }
    return m;
}

Mission circuit_mission(double t0, double speed, const LocalPosition& from, const LocalPosition& to,
                        int passes, double gap_s, double lateral_step) {
    Mission m;
    m.pattern = PatternTag::Circuit;
    double t = t0;
    LocalPosition a = from, b = to;
    for (int i = 0; i < passes; ++i) {
        m.waypoints.push_back({t, a});
        t += distance(a, b) / speed;
        m.waypoints.push_back({t, b});
        t += gap_s;
        a.y += lateral_step;
        b.y += lateral_step;
        std::swap(a, b);
    }
    return m;
}

namespace {

// Repeated zigzag sweeps (up then down in y) until t1; keeps the target well
// inside the azimuth envelope by using a narrow lateral extent.
Mission zigzag_patrol(double t0, double t1, double speed, double half_width, double y0, double y1,
                      double y_step, const std::vector<double>& altitudes, double hover_s) {
    Mission m;
    m.pattern = PatternTag::Zigzag;
    double t = t0;
    double x = -half_width;
    double y = y0;
    double dir = 1.0;
    std::size_t alt_i = 0;
    while (t < t1) {
        const double z = altitudes[alt_i++ % altitudes.size()];
        m.waypoints.push_back({t, {x, y, z}});
        t += 2.0 * half_width / speed;
        x = -x;
        m.waypoints.push_back({t, {x, y, z}});
        if (hover_s > 0.0) {
            t += hover_s;
            m.waypoints.push_back({t, {x, y, z}});
        }
        if ((dir > 0 && y + y_step > y1) || (dir < 0 && y - y_step < y0)) dir = -dir;
        y += dir * y_step;
        t += y_step / speed;
    }
    return m;
}

// One active block: 30 s empty sky, then target tracking from a 35 m hover,
// two airplane circuit passes, a descent, and a low-altitude survey phase with
// ground and infrastructure in view. `t0` offsets every waypoint so blocks
// can be chained into the long campaign.
void append_campaign_block(SceneRecipe& recipe, double t0) {
    auto& sensor_wp = recipe.sensor.trajectory.waypoints;
    auto add_sensor = [&](double t, LocalPosition p) { sensor_wp.push_back({t0 + t, p}); };

    // Sensor: high hover, tracking hover, descent, low survey with one
    // repositioning leg (the only interval where static returns pick up
    // nonzero doppler).
    add_sensor(0.0, {0.0, 0.0, 45.0});
    add_sensor(26.0, {0.0, 0.0, 45.0});
    add_sensor(30.0, {0.0, 0.0, 35.0});
    add_sensor(250.0, {0.0, 0.0, 35.0});
    add_sensor(262.0, {0.0, 0.0, 12.0});
    add_sensor(330.0, {0.0, 0.0, 12.0});
    add_sensor(340.0, {15.0, 5.0, 12.0});
    add_sensor(420.0, {15.0, 5.0, 12.0});
    recipe.sensor.yaw_schedule.push_back({t0, 0.0});

    // M300: narrow zigzag sweeps through the tracking phase, then low slow
    // passes above the survey area. Hover dwells at the turns leave
    // zero-doppler drone returns in the stream.
    {
        Actor m300;
        m300.profile = default_profile(ClassLabel::M300);
        Mission m = zigzag_patrol(t0 + 32.0, t0 + 242.0, 7.0, 12.0, 22.0, 58.0, 6.0,
                                  {33.0, 35.0, 37.0}, 5.0);
        Mission low = zigzag_patrol(t0 + 266.0, t0 + 416.0, 4.0, 10.0, 24.0, 48.0, 8.0,
                                    {14.5, 17.0}, 6.0);
        while (!m.waypoints.empty() && m.waypoints.back().t >= low.waypoints.front().t - 4.0) {
            m.waypoints.pop_back();
        }
        m.waypoints.insert(m.waypoints.end(), low.waypoints.begin(), low.waypoints.end());
        while (!m.waypoints.empty() && m.waypoints.back().t > t0 + 419.0) m.waypoints.pop_back();
        m300.mission = std::move(m);
        m300.mission.pattern = PatternTag::Zigzag;
        recipe.actors.push_back(m300);
    }

    // Mini: radial passes at the sensor altitude (its elevation coverage is
    // nearly coplanar), then long hovers near the survey area. The hovers add
    // zero-doppler drone returns that per-point features cannot separate from
    // static clutter.
    {
        Actor mini;
        mini.profile = default_profile(ClassLabel::Mini);
        Mission m;
        m.pattern = PatternTag::Radial;
        double t = t0 + 40.0;
        for (int cycle = 0; cycle < 3; ++cycle) {
            Mission rad = radial_mission(t, 4.0, 6.0, 22.0,
                                         {deg2rad(-8.0), deg2rad(0.0), deg2rad(6.0)}, 35.0);
            m.waypoints.insert(m.waypoints.end(), rad.waypoints.begin(), rad.waypoints.end());
            t = m.waypoints.back().t + 4.0;
        }
        m.waypoints.push_back({t0 + 250.0, {1.5, 20.0, 12.25}});
        m.waypoints.push_back({t0 + 330.0, {1.5, 20.0, 12.25}});
        m.waypoints.push_back({t0 + 345.0, {16.0, 24.0, 12.2}});
        m.waypoints.push_back({t0 + 419.0, {16.0, 24.0, 12.2}});
        mini.mission = std::move(m);
        recipe.actors.push_back(mini);
    }

    // Airplane: two fast inbound passes at long range during [210, 250],
    // near sensor altitude (the elevation envelope is narrow at range).
    {
        Actor plane;
        plane.profile = default_profile(ClassLabel::Airplane);
        plane.mission = circuit_mission(t0 + 210.0, 45.0, {-60.0, 340.0, 40.0}, {30.0, 120.0, 40.0},
                                        2, 4.0, -25.0);
        recipe.actors.push_back(plane);
    }
}

void add_campaign_infrastructure(SceneRecipe& recipe) {
    InfraBox a;
    a.min_corner = {-30.0, 70.0, 0.0};
    a.max_corner = {-10.0, 90.0, 14.0};
    a.rate_hz = 95.0;
    InfraBox b;
    b.min_corner = {25.0, 95.0, 0.0};
    b.max_corner = {40.0, 115.0, 9.0};
    b.rate_hz = 60.0;
    b.rcs_mean_dbsm = -1.0;
    InfraBox mast;
    mast.min_corner = {-2.0, 55.0, 0.0};
    mast.max_corner = {0.0, 57.0, 18.0};
    mast.rate_hz = 30.0;
    mast.rcs_mean_dbsm = 5.0;
    recipe.infrastructure = {a, b, mast};
}

}  // namespace

SceneRecipe builtin_recipe(const std::string& name, std::uint64_t seed) {
    SceneRecipe recipe;
    recipe.seed = seed;
    recipe.station = {55.676, -4.046, 180.0};
    recipe.sensor.noise = SensorErrorModel{0.5, deg2rad(1.0), deg2rad(1.0), 1.5};
    recipe.ground.enabled = true;
    recipe.ground.rate_hz = 820.0;
    add_campaign_infrastructure(recipe);

    if (name == "campaign") {
        recipe.duration_s = 420.0;
        append_campaign_block(recipe, 0.0);
    } else if (name == "campaign-full") {
        // 2-hour equivalent: six active blocks separated by idle
        // high-altitude segments (no targets, no ground in view).
        recipe.duration_s = 7200.0;
        for (int cycle = 0; cycle < 6; ++cycle) {
            const double t0 = cycle * 1200.0;
            append_campaign_block(recipe, t0);
            // idle hover between blocks
            recipe.sensor.trajectory.waypoints.push_back({t0 + 424.0, {0.0, 0.0, 55.0}});
            recipe.sensor.trajectory.waypoints.push_back({t0 + 1196.0, {0.0, 0.0, 55.0}});
        }
    } else if (name == "smoke") {
        recipe.duration_s = 40.0;
        recipe.ground.rate_hz = 400.0;
        auto& wp = recipe.sensor.trajectory.waypoints;
        wp.push_back({0.0, {0.0, 0.0, 12.0}});
        wp.push_back({40.0, {0.0, 0.0, 12.0}});
        recipe.sensor.yaw_schedule.push_back({0.0, 0.0});
        Actor m300;
        m300.profile = default_profile(ClassLabel::M300);
        m300.mission = zigzag_mission(2.0, 6.0, 20.0, 20.0, 44.0, 12.0, {14.0, 18.0});
        recipe.actors.push_back(m300);
        Actor mini;
        mini.profile = default_profile(ClassLabel::Mini);
        mini.mission = radial_mission(4.0, 5.0, 8.0, 30.0, {deg2rad(-8.0), deg2rad(8.0)}, 12.0);
        recipe.actors.push_back(mini);
        recipe.infrastructure.resize(1);
    } else {
        throw ConfigError("unknown builtin recipe: " + name);
    }
    return recipe;
}

bool is_builtin_recipe(const std::string& name) {
    return name == "campaign" || name == "campaign-full" || name == "smoke";
}

}  // namespace radarseg
