#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "radarseg/geometry.hpp"

using namespace radarseg;

TEST_CASE("geodetic_to_local maps the station to the origin exactly") {
    const GeodeticPosition station{55.676, -4.046, 180.0};
    const LocalPosition p = geodetic_to_local(station, station);
    CHECK(p.x == 0.0);
    CHECK(p.y == 0.0);
    CHECK(p.z == 0.0);
}

TEST_CASE("geodetic_to_local northward offset matches the meridian arc length") {
    // 1 deg of latitude is about 111.32 km on the tangent sphere, so 1e-4 deg
    // is about 11.13 m north.
    const GeodeticPosition station{0.0, 0.0, 0.0};
    const GeodeticPosition p{1e-4, 0.0, 0.0};
    const LocalPosition local = geodetic_to_local(p, station);
    CHECK(local.y == doctest::Approx(11.1319).epsilon(1e-3));
    CHECK(local.x == 0.0);
}

TEST_CASE("geodetic_to_local altitude passes through") {
    const GeodeticPosition station{55.0, -4.0, 100.0};
    GeodeticPosition p = station;
    p.alt_m += 50.0;
    CHECK(geodetic_to_local(p, station).z == doctest::Approx(50.0));
}

TEST_CASE("geodetic_to_local rejects out-of-range coordinates") {
    const GeodeticPosition station{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(geodetic_to_local({91.0, 0.0, 0.0}, station), ConfigError);
    CHECK_THROWS_AS(geodetic_to_local({0.0, 181.0, 0.0}, station), ConfigError);
    CHECK_THROWS_AS(geodetic_to_local({0.0, 0.0, 0.0}, {-90.5, 0.0, 0.0}), ConfigError);
}

TEST_CASE("geodetic round trip") {
    const GeodeticPosition station{55.676, -4.046, 180.0};
    const LocalPosition p{123.4, -56.7, 21.0};
    const LocalPosition back = geodetic_to_local(local_to_geodetic(p, station), station);
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-9));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-9));
    CHECK(back.z == doctest::Approx(p.z).epsilon(1e-12));
}

TEST_CASE("polar_to_cartesian boresight and axes") {
    const LocalPosition b = polar_to_cartesian({10.0, 0.0, 0.0});
    CHECK(b.x == 0.0);
    CHECK(b.y == doctest::Approx(10.0));
    CHECK(b.z == 0.0);

    const LocalPosition right = polar_to_cartesian({10.0, kPi / 2.0, 0.0});
    CHECK(right.x == doctest::Approx(10.0));
    CHECK(right.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(right.z == 0.0);
}

TEST_CASE("polar_to_cartesian evaluates the stated formulas") {
    // (R=20, az=30deg, el=30deg): x = 20*sin*cos = 8.660, y = 15.0, z = 10.0
    const LocalPosition p = polar_to_cartesian({20.0, kPi / 6.0, kPi / 6.0});
    CHECK(p.x == doctest::Approx(8.660).epsilon(1e-3));
    CHECK(p.y == doctest::Approx(15.0).epsilon(1e-9));
    CHECK(p.z == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("polar/cartesian round trip over the operating envelope") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(1e-3, 200.0);
    std::uniform_real_distribution<double> ua(-kPi / 2 + 1e-6, kPi / 2 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
        const PolarReturn in{ur(rng), ua(rng), ua(rng)};
        const PolarReturn out = cartesian_to_polar(polar_to_cartesian(in));
        CHECK(std::abs(out.range - in.range) < 1e-9);
        CHECK(std::abs(out.azimuth - in.azimuth) < 1e-9);
        CHECK(std::abs(out.elevation - in.elevation) < 1e-9);
    }
}

TEST_CASE("sensor_to_world with zero yaw at the origin equals polar_to_cartesian") {
    const PolarReturn r{17.0, 0.3, -0.1};
    const LocalPosition a = sensor_to_world(r, Pose{});
    const LocalPosition b = polar_to_cartesian(r);
    CHECK(a.x == doctest::Approx(b.x));
    CHECK(a.y == doctest::Approx(b.y));
    CHECK(a.z == doctest::Approx(b.z));
}

TEST_CASE("sensor_to_world rotates the boresight by yaw") {
    // yaw +90 deg turns the boresight from north (+y) to east (+x)
    const Pose pose{{0.0, 0.0, 0.0}, kPi / 2.0};
    const LocalPosition p = sensor_to_world({10.0, 0.0, 0.0}, pose);
    CHECK(p.x == doctest::Approx(10.0));
    CHECK(p.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(p.z == 0.0);
}

TEST_CASE("sensor_to_world translates by the sensor position") {
    const Pose pose{{5.0, 5.0, 5.0}, 0.0};
    const LocalPosition p = sensor_to_world({10.0, 0.0, 0.0}, pose);
    CHECK(p.x == doctest::Approx(5.0));
    CHECK(p.y == doctest::Approx(15.0));
    CHECK(p.z == doctest::Approx(5.0));
}

TEST_CASE("sensor_to_world matches the yaw-corrected horizontal formula") {
    // x_world = x_s + R sin(az + yaw) cos(el) for any return and pose
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const PolarReturn r{40.0 + 10.0 * u(rng), 0.8 * u(rng), 0.2 * u(rng)};
        const Pose pose{{u(rng) * 50, u(rng) * 50, 20 + u(rng)}, u(rng) * kPi};
        const LocalPosition w = sensor_to_world(r, pose);
        const double expect_x =
            pose.position.x + r.range * std::sin(r.azimuth + pose.yaw) * std::cos(r.elevation);
        const double expect_z = pose.position.z + r.range * std::sin(r.elevation);
        CHECK(w.x == doctest::Approx(expect_x).epsilon(1e-9));
        CHECK(w.z == doctest::Approx(expect_z).epsilon(1e-9));
    }
}

TEST_CASE("sensor_to_world is rigid: pairwise distances are preserved") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ur(0.5, 150.0);
    std::uniform_real_distribution<double> ua(-1.0, 1.0);
    const Pose pose{{12.0, -7.0, 30.0}, 1.1};
    for (int i = 0; i < 500; ++i) {
        const PolarReturn a{ur(rng), ua(rng), 0.4 * ua(rng)};
        const PolarReturn b{ur(rng), ua(rng), 0.4 * ua(rng)};
        const double d_world = distance(sensor_to_world(a, pose), sensor_to_world(b, pose));
        const double d_cart = distance(polar_to_cartesian(a), polar_to_cartesian(b));
        CHECK(std::abs(d_world - d_cart) < 1e-9);
    }
}

TEST_CASE("world_to_sensor inverts sensor_to_world") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Pose pose{{u(rng) * 40, u(rng) * 40, 15.0}, u(rng) * kPi};
        const LocalPosition cart{u(rng) * 60, std::abs(u(rng)) * 60, u(rng) * 10};
        const LocalPosition back = world_to_sensor(sensor_cart_to_world(cart, pose), pose);
        CHECK(std::abs(back.x - cart.x) < 1e-9);
        CHECK(std::abs(back.y - cart.y) < 1e-9);
        CHECK(std::abs(back.z - cart.z) < 1e-9);
    }
}

TEST_CASE("normalize_angle lands in (-pi, pi]") {
    CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
    CHECK(normalize_angle(0.5) == doctest::Approx(0.5));
    CHECK(normalize_angle(-4.0 * kPi + 0.25) == doctest::Approx(0.25));
}
