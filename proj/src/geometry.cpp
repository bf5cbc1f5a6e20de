#include "radarseg/geometry.hpp"

#include <string>

namespace radarseg {

LocalPosition geodetic_to_local(const GeodeticPosition& p, const GeodeticPosition& station) {
    auto check = [](const GeodeticPosition& g, const char* which) {
        if (g.lat_deg < -90.0 || g.lat_deg > 90.0 || g.lon_deg < -180.0 || g.lon_deg > 180.0) {
            throw ConfigError(std::string("geodetic position out of range: ") + which);
        }
    };
    check(p, "point");
    check(station, "station");
    const double lat0 = deg2rad(station.lat_deg);
    const double x = deg2rad(p.lon_deg - station.lon_deg) * kEarthRadiusM * std::cos(lat0);
    const double y = deg2rad(p.lat_deg - station.lat_deg) * kEarthRadiusM;
    const double z = p.alt_m - station.alt_m;
    return {x, y, z};
}

GeodeticPosition local_to_geodetic(const LocalPosition& p, const GeodeticPosition& station) {
    const double lat0 = deg2rad(station.lat_deg);
    GeodeticPosition g;
    g.lat_deg = station.lat_deg + rad2deg(p.y / kEarthRadiusM);
    g.lon_deg = station.lon_deg + rad2deg(p.x / (kEarthRadiusM * std::cos(lat0)));
    g.alt_m = station.alt_m + p.z;
    return g;
}

LocalPosition polar_to_cartesian(const PolarReturn& r) {
    const double ce = std::cos(r.elevation);
    return {r.range * std::sin(r.azimuth) * ce,
            r.range * std::cos(r.azimuth) * ce,
            r.range * std::sin(r.elevation)};
}

PolarReturn cartesian_to_polar(const LocalPosition& p) {
    PolarReturn r;
    r.range = norm(p);
    if (r.range <= 0.0) return r;
    r.azimuth = std::atan2(p.x, p.y);
    r.elevation = std::asin(p.z / r.range);
    return r;
}

LocalPosition sensor_cart_to_world(const LocalPosition& c, const Pose& pose) {
    const double cy = std::cos(pose.yaw);
    const double sy = std::sin(pose.yaw);
    return {pose.position.x + c.x * cy + c.y * sy,
            pose.position.y - c.x * sy + c.y * cy,
            pose.position.z + c.z};
}

LocalPosition sensor_to_world(const PolarReturn& r, const Pose& pose) {
    return sensor_cart_to_world(polar_to_cartesian(r), pose);
}

LocalPosition world_to_sensor(const LocalPosition& world, const Pose& pose) {
    const LocalPosition d = world - pose.position;
    const double cy = std::cos(pose.yaw);
    const double sy = std::sin(pose.yaw);
    return {d.x * cy - d.y * sy, d.x * sy + d.y * cy, d.z};
}

}  // namespace radarseg
