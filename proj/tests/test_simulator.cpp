#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>

#include "radarseg/simulator.hpp"

using namespace radarseg;

namespace {

std::array<double, kNumClasses + 1> class_shares(const std::vector<RadarReturn>& returns) {
    std::array<double, kNumClasses + 1> counts{};
    for (const auto& r : returns) counts[r.label ? static_cast<int>(*r.label) : 0] += 1.0;
    for (auto& c : counts) c /= static_cast<double>(returns.size());
    return counts;
}

SceneRecipe hover_recipe(double alt, double duration = 20.0) {
    SceneRecipe r;
    r.duration_s = duration;
    r.seed = 99;
    r.sensor.trajectory.waypoints = {{0.0, {0, 0, alt}}, {duration, {0, 0, alt}}};
    r.sensor.yaw_schedule = {{0.0, 0.0}};
    return r;
}

}  // namespace

TEST_CASE("in_coverage: boresight mid-range core is exactly 1") {
    const TargetProfile m300 = default_profile(ClassLabel::M300);
    const double p = in_coverage(m300.coverage, {0.0, m300.coverage.max_range_m / 2.0, 0.0});
    CHECK(p == 1.0);
}

TEST_CASE("in_coverage: outside the hull is exactly 0") {
    const TargetProfile m300 = default_profile(ClassLabel::M300);
    CHECK(in_coverage(m300.coverage, {0.0, 95.0, 0.0}) == 0.0);
    CHECK(in_coverage(m300.coverage, {0.0, -10.0, 0.0}) == 0.0);  // behind
    CHECK(in_coverage(m300.coverage, {80.0, 10.0, 0.0}) == 0.0);  // far off axis
}

TEST_CASE("in_coverage: M300 detectable at 85 m boresight, gone at 95 m") {
    const TargetProfile m300 = default_profile(ClassLabel::M300);
    CHECK(in_coverage(m300.coverage, {0.0, 85.0, 0.0}) > 0.0);
    CHECK(in_coverage(m300.coverage, {0.0, 95.0, 0.0}) == 0.0);
}

TEST_CASE("in_coverage: Mini envelope is much smaller than the M300 one") {
    const TargetProfile mini = default_profile(ClassLabel::Mini);
    CHECK(in_coverage(mini.coverage, {0.0, 20.0, 0.0}) == 1.0);
    CHECK(in_coverage(mini.coverage, {0.0, 45.0, 0.0}) == 0.0);
    // elevation nearly coplanar: 3 m up at 25 m range is far outside
    CHECK(in_coverage(mini.coverage, {0.0, 25.0, 4.0}) == 0.0);
}

TEST_CASE("in_coverage tapers smoothly in (0,1) near the hull") {
    const TargetProfile m300 = default_profile(ClassLabel::M300);
    const double p_edge = in_coverage(m300.coverage, {0.0, 88.0, 0.0});
    CHECK(p_edge > 0.0);
    CHECK(p_edge < 1.0);
}

TEST_CASE("doppler_of closed forms") {
    CHECK(doppler_of({0, 0, 0}, {0, 0, 0}, {0, 1, 0}) == 0.0);
    CHECK(doppler_of({0, -5, 0}, {0, 0, 0}, {0, 1, 0}) == doctest::Approx(-5.0));
    CHECK(doppler_of({3, 4, 0}, {0, 1, 0}, {0.6, 0.8, 0}) == doctest::Approx(4.2));
    CHECK_THROWS_AS(doppler_of({1, 0, 0}, {0, 0, 0}, {0, 0, 0}), ConfigError);
    CHECK_THROWS_AS(doppler_of({1, 0, 0}, {0, 0, 0}, {0, 2, 0}), ConfigError);
}

TEST_CASE("empty sky: high hover with no targets yields no returns") {
    SceneRecipe r = hover_recipe(45.0);
    r.ground.enabled = true;
    r.ground.rate_hz = 1500.0;  // irrelevant: ground is out of the FoV at 45 m
    const auto returns = simulate(r);
    CHECK(returns.empty());
}

TEST_CASE("inbound target head-on: doppler is minus its speed") {
    SceneRecipe r = hover_recipe(30.0, 5.0);
    Actor m300;
    m300.profile = default_profile(ClassLabel::M300);
    m300.mission.pattern = PatternTag::Manual;
    m300.mission.waypoints = {{0.0, {0, 80, 30}}, {6.0, {0, 20, 30}}};  // 10 m/s inbound
    r.actors.push_back(m300);
    const auto returns = simulate(r);
    REQUIRE(returns.size() > 50);
    double mean = 0.0;
    for (const auto& ret : returns) {
        CHECK(ret.doppler < -8.5);
        CHECK(ret.doppler > -11.5);
        mean += ret.doppler;
    }
    mean /= static_cast<double>(returns.size());
    CHECK(mean == doctest::Approx(-10.0).epsilon(0.03));
}

TEST_CASE("same recipe and seed produce identical streams") {
    const SceneRecipe r = builtin_recipe("smoke", 4242);
    const auto a = simulate(r);
    const auto b = simulate(r);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].t == b[i].t);
        CHECK(a[i].polar.range == b[i].polar.range);
        CHECK(a[i].doppler == b[i].doppler);
        CHECK(a[i].rcs == b[i].rcs);
        CHECK(a[i].label == b[i].label);
    }
}

TEST_CASE("different seeds produce different streams") {
    const auto a = simulate(builtin_recipe("smoke", 1));
    const auto b = simulate(builtin_recipe("smoke", 2));
    REQUIRE(!a.empty());
    REQUIRE(!b.empty());
    bool differs = a.size() != b.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i) {
        differs = a[i].t != b[i].t || a[i].rcs != b[i].rcs;
    }
    CHECK(differs);
}

TEST_CASE("hovering sensor: static world returns have exactly zero doppler") {
    SceneRecipe r = hover_recipe(10.0, 10.0);
    r.ground.enabled = true;
    r.ground.rate_hz = 800.0;
    InfraBox box;
    box.min_corner = {-20, 60, 0};
    box.max_corner = {-5, 75, 12};
    box.rate_hz = 150.0;
    r.infrastructure.push_back(box);
    const auto returns = simulate(r);
    REQUIRE(returns.size() > 1000);
    for (const auto& ret : returns) CHECK(ret.doppler == 0.0);
}

TEST_CASE("moving sensor: static world returns pick up the ego-motion doppler") {
    SceneRecipe r = hover_recipe(10.0, 10.0);
    r.sensor.trajectory.waypoints = {{0.0, {0, 0, 10}}, {10.0, {0, 20, 10}}};  // 2 m/s north
    r.ground.enabled = true;
    r.ground.rate_hz = 500.0;
    const auto returns = simulate(r);
    REQUIRE(returns.size() > 500);
    int nonzero = 0;
    for (const auto& ret : returns) {
        if (ret.doppler != 0.0) ++nonzero;
        CHECK(std::abs(ret.doppler) <= 2.000001);
    }
    CHECK(nonzero == static_cast<int>(returns.size()));
}

TEST_CASE("returns are time sorted and consistent polar/cartesian") {
    const auto returns = simulate(builtin_recipe("smoke", 7));
    REQUIRE(!returns.empty());
    for (std::size_t i = 1; i < returns.size(); ++i) CHECK(returns[i].t >= returns[i - 1].t);
    for (const auto& r : returns) {
        const LocalPosition c = polar_to_cartesian(r.polar);
        CHECK(distance(c, r.cartesian) < 1e-9);
    }
}

TEST_CASE("RCS ordering: simulated M300 mean exceeds Mini mean for every seed") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull}) {
        const auto returns = simulate(builtin_recipe("smoke", seed));
        double m300 = 0.0, mini = 0.0;
        int n300 = 0, nmini = 0;
        for (const auto& r : returns) {
            if (r.label == ClassLabel::M300) {
                m300 += r.rcs;
                ++n300;
            } else if (r.label == ClassLabel::Mini) {
                mini += r.rcs;
                ++nmini;
            }
        }
        REQUIRE(n300 > 10);
        REQUIRE(nmini > 10);
        CHECK(m300 / n300 > mini / nmini);
    }
}

TEST_CASE("mission speed validation rejects infeasible recipes") {
    SceneRecipe r = hover_recipe(30.0, 5.0);
    Actor mini;
    mini.profile = default_profile(ClassLabel::Mini);  // max 16 m/s
    mini.mission.waypoints = {{0.0, {0, 10, 30}}, {1.0, {0, 40, 30}}};  // 30 m/s
    r.actors.push_back(mini);
    CHECK_THROWS_AS(validate_recipe(r), ConfigError);
}

TEST_CASE("default campaign reproduces the field class imbalance") {
    const auto returns = simulate(builtin_recipe("campaign", 42));
    REQUIRE(returns.size() > 100000);
    const auto shares = class_shares(returns);
    const double ground = shares[1], m300 = shares[2], airplane = shares[3], mini = shares[4],
                 infra = shares[5];

    // ordering: ground >> infra ~ m300 > mini > airplane
    CHECK(ground > 0.5);
    CHECK(ground < 0.85);
    CHECK(infra > mini);
    CHECK(m300 > mini);
    CHECK(mini > airplane);
    CHECK(airplane <= 0.01);
    CHECK(std::abs(infra - m300) / std::max(infra, m300) < 0.5);

    // each share within +-50% relative of the field campaign's table
    const std::map<int, double> expected = {{1, 0.7016}, {2, 0.1368}, {3, 0.0014}, {4, 0.0158}, {5, 0.1445}};
    for (const auto& [cls, want] : expected) {
        const double got = shares[static_cast<std::size_t>(cls)];
        INFO("class ", cls, ": got ", got, ", want ", want);
        CHECK(got > want * 0.5);
        CHECK(got < want * 1.5);
    }
}

TEST_CASE("actor tracks and sensor poses cover the scene") {
    const SceneRecipe r = builtin_recipe("smoke", 5);
    const auto tracks = actor_tracks(r);
    REQUIRE(tracks.size() == r.actors.size());
    for (const auto& t : tracks) {
        CHECK(t.fixes.front().t == 0.0);
        CHECK(t.fixes.back().t >= r.duration_s - 0.2);
    }
    const auto poses = sensor_pose_track(r);
    CHECK(poses.front().first == 0.0);
    CHECK(poses.back().first >= r.duration_s - 0.2);
}
