#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "hgsim/errors.hpp"
#include "hgsim/metrics.hpp"

using namespace hgsim;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeed = 60.0 / 3.6;
}

TEST_CASE("sdlp: N-1 divisor, translation invariant") {
    CHECK(sdlp({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(1.29099444874).epsilon(1e-10));
    CHECK(sdlp({0.5, 0.5, 0.5}) == doctest::Approx(0.0));
    CHECK(sdlp({101.0, 102.0, 103.0, 104.0}) ==
          doctest::Approx(sdlp({1.0, 2.0, 3.0, 4.0})).epsilon(1e-12));
    CHECK_THROWS_AS((void)sdlp({1.0}), ConfigError);
}

TEST_CASE("male and sdlp variation") {
    CHECK(male({1.0, -2.0, 3.0}) == doctest::Approx(2.0));
    CHECK(male({0.0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)male({}), ConfigError);

    CHECK(sdlp_var(0.2, 0.1) == doctest::Approx(-50.0));
    CHECK(sdlp_var(0.1, 0.13) == doctest::Approx(30.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)sdlp_var(0.0, 0.1), ConfigError);
}

TEST_CASE("lane geometry validation") {
    CHECK_NOTHROW(LaneGeometry{3.6, 0.1}.validate());
    CHECK_THROWS_AS((LaneGeometry{0.0, 0.1}).validate(), ConfigError);
    CHECK_THROWS_AS((LaneGeometry{3.6, 0.0}).validate(), ConfigError);
    CHECK_THROWS_AS((LaneGeometry{3.6, 1.9}).validate(), ConfigError);
}

TEST_CASE("straight-lane TLC matches the closed-form crossing") {
    LaneGeometry geom{3.6, 0.1};

    SUBCASE("constant heading toward the boundary") {
        const double theta = 5.0 * kPi / 180.0;
        auto tlc = tlc_series_straight_serial({{0.0, theta, 0.0}}, geom, kSpeed);
        REQUIRE(tlc.size() == 1);
        REQUIRE(tlc[0].has_value());
        const double exact = (3.6 / 2.0 - 0.1) / std::sin(theta) / kSpeed;
        CHECK(std::abs(*tlc[0] - exact) / exact < 0.01);
    }

    SUBCASE("constant yaw rate sweeps a circle") {
        const double R = 100.0;
        auto tlc =
            tlc_series_straight_serial({{0.0, 0.0, kSpeed / R}}, geom, kSpeed);
        REQUIRE(tlc[0].has_value());
        const double exact = R * std::acos(1.0 - 1.7 / R) / kSpeed;
        CHECK(std::abs(*tlc[0] - exact) / exact < 0.01);
    }

    SUBCASE("centered and parallel never crosses") {
        auto tlc = tlc_series_straight_serial({{0.0, 0.0, 0.0}}, geom, kSpeed);
        CHECK_FALSE(tlc[0].has_value());
    }

    SUBCASE("starting nearer the boundary crosses sooner") {
        const double theta = 3.0 * kPi / 180.0;
        auto tlc = tlc_series_straight_serial(
            {{0.0, theta, 0.0}, {1.0, theta, 0.0}}, geom, kSpeed);
        REQUIRE(tlc[0].has_value());
        REQUIRE(tlc[1].has_value());
        CHECK(*tlc[1] < *tlc[0]);
    }

    SUBCASE("already beyond the margin crosses immediately") {
        auto tlc = tlc_series_straight_serial({{1.75, 0.0, 0.0}}, geom, kSpeed);
        REQUIRE(tlc[0].has_value());
        CHECK(*tlc[0] == doctest::Approx(0.0));
    }

    CHECK_THROWS_AS((void)tlc_series_straight_serial({}, geom, 0.0), ConfigError);
}

TEST_CASE("course-aware TLC agrees with the road-frame kernel on a straight") {
    Course course({{2000.0, 0.0}}, 3.6);
    LaneGeometry geom{3.6, 0.1};

    SimLog log;
    std::vector<TlcSample> samples;
    const double cases[][3] = {{0.3, 0.05, 0.0},  {-0.8, -0.02, 0.01},
                               {0.0, 0.0, 0.03},  {1.2, 0.1, -0.05},
                               {-0.2, 0.0, 0.0},  {0.5, -0.08, 0.002}};
    for (const auto& c : cases) {
        LogRecord rec{};
        rec.X = 500.0;
        rec.Y = c[0];
        rec.psi = c[1];
        rec.r = c[2];
        log.records.push_back(rec);
        samples.push_back({c[0], c[1], c[2]});
    }

    auto on_course = tlc_series_serial(log, course, geom, kSpeed);
    auto road_frame = tlc_series_straight_serial(samples, geom, kSpeed);
    REQUIRE(on_course.size() == road_frame.size());
    for (size_t i = 0; i < on_course.size(); ++i) {
        REQUIRE(on_course[i].has_value() == road_frame[i].has_value());
        if (on_course[i])
            CHECK(*on_course[i] == doctest::Approx(*road_frame[i]).epsilon(1e-9));
    }
}

TEST_CASE("lowest-decile TLC mean") {
    std::vector<std::optional<double>> tlc;
    for (int i = 1; i <= 20; ++i) tlc.push_back(static_cast<double>(i));
    auto m = tlc_low10_mean(tlc);  // k = 2 -> mean(1, 2)
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(1.5));

    tlc.insert(tlc.begin() + 3, std::nullopt);  // absent samples don't count
    m = tlc_low10_mean(tlc);
    REQUIRE(m.has_value());
    CHECK(*m == doctest::Approx(1.5));

    std::vector<std::optional<double>> few(9, 1.0);
    CHECK_FALSE(tlc_low10_mean(few).has_value());
}

TEST_CASE("steering reversal rate, gap method") {
    SUBCASE("sawtooth with three direction changes") {
        CHECK(swrr({0.0, 0.2, 0.0, 0.2, 0.0}, 60.0) == doctest::Approx(3.0));
        // Over half the duration the rate doubles.
        CHECK(swrr({0.0, 0.2, 0.0, 0.2, 0.0}, 30.0) == doctest::Approx(6.0));
    }
    SUBCASE("monotone series has no reversals") {
        CHECK(swrr({0.0, 0.1, 0.25, 0.3, 0.31}, 60.0) == doctest::Approx(0.0));
    }
    SUBCASE("sub-threshold jitter does not count") {
        CHECK(swrr({0.0, 0.2, 0.19, 0.2, 0.19, 0.2}, 60.0) == doctest::Approx(0.0));
    }
    SUBCASE("custom gap angle") {
        // 0.01 rad swings count once alpha drops below them.
        CHECK(swrr({0.0, 0.01, 0.0, 0.01}, 60.0, 0.005) == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS((void)swrr({0.0, 0.1}, 0.0), ConfigError);
}

TEST_CASE("turn start offset relative to the junction") {
    std::vector<double> s, phi;
    for (int i = 0; i <= 200; ++i) {
        s.push_back(static_cast<double>(i));             // 1 m per sample
        phi.push_back(i >= 110 ? 0.1 : 0.01);            // crosses 3 deg at s = 110
    }
    CHECK(turn_start(phi, s, 100.0) == doctest::Approx(10.0));
    CHECK(turn_start(phi, s, 150.0) == doctest::Approx(-40.0));  // before the junction

    std::vector<double> flat(s.size(), 0.01);
    CHECK_THROWS_AS((void)turn_start(flat, s, 100.0), ConfigError);
    CHECK_THROWS_AS((void)turn_start({0.1}, {1.0, 2.0}, 0.0), ConfigError);
}

TEST_CASE("eyelid closure percentage over one-minute windows") {
    std::vector<double> open;
    auto add = [&](int n, int closed) {
        for (int i = 0; i < n; ++i) open.push_back(i < closed ? 0.15 : 0.9);
    };
    add(60, 12);  // 20 %
    add(60, 6);   // 10 %
    add(10, 5);   // trailing partial window: 50 %
    auto p = perclos_p80(open, 1.0);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == doctest::Approx(20.0));
    CHECK(p[1] == doctest::Approx(10.0));
    CHECK(p[2] == doctest::Approx(50.0));

    // "80 % closed" boundary is inclusive at openness 0.2.
    auto q = perclos_p80({0.2, 0.21}, 1.0);
    REQUIRE(q.size() == 1);
    CHECK(q[0] == doctest::Approx(50.0));

    CHECK_THROWS_AS((void)perclos_p80({}, 1.0), ConfigError);
    CHECK_THROWS_AS((void)perclos_p80({0.5}, 0.0), ConfigError);
}

TEST_CASE("percent road center around the modal gaze bin") {
    SUBCASE("inclusive 6 degree radius") {
        std::vector<std::pair<double, double>> gaze(10, {0.25, 0.25});
        gaze.push_back({6.25, 0.25});   // exactly 6.0 deg from the centroid: in
        gaze.push_back({20.0, 20.0});   // far out
        gaze.push_back({-20.0, 5.0});   // far out
        CHECK(prc(gaze) == doctest::Approx(100.0 * 11.0 / 13.0).epsilon(1e-12));
    }
    SUBCASE("bin ties resolve to the first-seen bin") {
        std::vector<std::pair<double, double>> gaze{
            {0.1, 0.1},   {0.2, 0.2},   {0.3, 0.1},    // bin A, first seen
            {20.1, 20.1}, {20.2, 20.2}, {20.3, 20.1},  // bin B, same count
            {5.0, 0.0}};                               // within 6 deg of A only
        CHECK(prc(gaze) == doctest::Approx(100.0 * 4.0 / 7.0).epsilon(1e-12));

        std::vector<std::pair<double, double>> swapped{
            {20.1, 20.1}, {20.2, 20.2}, {20.3, 20.1},
            {0.1, 0.1},   {0.2, 0.2},   {0.3, 0.1},
            {5.0, 0.0}};
        CHECK(prc(swapped) == doctest::Approx(100.0 * 3.0 / 7.0).epsilon(1e-12));
    }
    SUBCASE("single cluster scores 100") {
        std::vector<std::pair<double, double>> gaze(50, {-3.0, 1.0});
        CHECK(prc(gaze) == doctest::Approx(100.0));
    }
    CHECK_THROWS_AS((void)prc({}), ConfigError);
}
