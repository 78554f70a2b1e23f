#include "doctest.h"

#include <cmath>
#include <limits>

#include "hiersim/disturbance.hpp"
#include "hiersim/errors.hpp"

using namespace hiersim;

TEST_CASE("constant holds its value") {
    const dist::DisturbanceSpec s = dist::Constant{50.0};
    for (double t : {0.0, 1.5, 1e6}) {
        CHECK(dist::gen_signal(s, t, 1, 0) == 50.0);
    }
}

TEST_CASE("step switches exactly at t0") {
    const dist::DisturbanceSpec s = dist::Step{100.0, 50.0, 90.0};
    CHECK(dist::gen_signal(s, 0.0, 1, 0) == 50.0);
    CHECK(dist::gen_signal(s, 99.9, 1, 0) == 50.0);
    CHECK(dist::gen_signal(s, 100.0, 1, 0) == 90.0);
    CHECK(dist::gen_signal(s, 500.0, 1, 0) == 90.0);
}

TEST_CASE("pulse is active on a half-open window") {
    const dist::DisturbanceSpec s = dist::Pulse{100.0, 10.0, 60.0, 150.0};
    CHECK(dist::gen_signal(s, 99.9, 1, 0) == 60.0);
    CHECK(dist::gen_signal(s, 100.0, 1, 0) == 150.0);
    CHECK(dist::gen_signal(s, 109.9, 1, 0) == 150.0);
    CHECK(dist::gen_signal(s, 110.0, 1, 0) == 60.0);
}

TEST_CASE("noiseless sinusoid hits known phases") {
    const dist::DisturbanceSpec s = dist::Sinusoid{50.0, 20.0, 600.0, 0.0};
    CHECK(dist::gen_signal(s, 0.0, 1, 0) == doctest::Approx(50.0));
    CHECK(dist::gen_signal(s, 150.0, 1, 0) == doctest::Approx(70.0));
    CHECK(dist::gen_signal(s, 300.0, 1, 0) == doctest::Approx(50.0));
    CHECK(dist::gen_signal(s, 450.0, 1, 0) == doctest::Approx(30.0));
    // Seed has no effect without noise.
    CHECK(dist::gen_signal(s, 150.0, 1, 0) == dist::gen_signal(s, 150.0, 2, 0));
}

TEST_CASE("noisy sinusoid is reproducible per seed and time") {
    const dist::DisturbanceSpec s = dist::Sinusoid{50.0, 20.0, 600.0, 5.0};
    const double a = dist::gen_signal(s, 150.0, 1, 0);
    CHECK(dist::gen_signal(s, 150.0, 1, 0) == a);
    CHECK(dist::gen_signal(s, 150.0, 2, 0) != a);
    CHECK(dist::gen_signal(s, 150.5, 1, 0) != a);
    CHECK(dist::gen_signal(s, 150.0, 1, 3) != a); // different channel
}

TEST_CASE("piecewise_random holds each dwell and tracks the seed") {
    const dist::DisturbanceSpec s = dist::PiecewiseRandom{50.0, 20.0, 30.0};
    const double v0 = dist::gen_signal(s, 0.0, 7, 0);
    CHECK(dist::gen_signal(s, 15.0, 7, 0) == v0);
    CHECK(dist::gen_signal(s, 29.999, 7, 0) == v0);
    const double v1 = dist::gen_signal(s, 30.0, 7, 0);
    CHECK(v1 != v0);
    CHECK(dist::gen_signal(s, 45.0, 7, 0) == v1);
    CHECK(dist::gen_signal(s, 15.0, 8, 0) != v0);
    // Values stay inside mean +/- spread.
    for (int k = 0; k < 200; ++k) {
        const double v = dist::gen_signal(s, 30.0 * k, 7, 0);
        CHECK(v >= 30.0);
        CHECK(v <= 70.0);
    }
}

TEST_CASE("gen_load floors at zero under heavy noise") {
    const dist::DisturbanceSpec s = dist::Sinusoid{5.0, 0.0, 600.0, 50.0};
    for (int k = 0; k < 500; ++k) {
        CHECK(dist::gen_load(s, 0.5 * k, 3, dist::kLoadChannel) >= 0.0);
    }
}

TEST_CASE("gen_efficiency clamps into its physical range") {
    const dist::DisturbanceSpec s = dist::Sinusoid{0.9, 0.0, 600.0, 1.0};
    for (int k = 0; k < 500; ++k) {
        const double v =
            dist::gen_efficiency(s, 0.5 * k, 3, dist::efficiency_channel(0));
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gen_signal rejects bad times") {
    const dist::DisturbanceSpec s = dist::Constant{1.0};
    CHECK_THROWS_AS(dist::gen_signal(s, -1.0, 1, 0), SimError);
    CHECK_THROWS_AS(
        dist::gen_signal(s, std::numeric_limits<double>::quiet_NaN(), 1, 0),
        SimError);
}

TEST_CASE("load spec validation tracks the noiseless range") {
    CHECK_NOTHROW(dist::validate_load_spec(dist::Constant{0.0}));
    CHECK_THROWS_AS(dist::validate_load_spec(dist::Constant{-1.0}), ConfigError);
    CHECK_NOTHROW(dist::validate_load_spec(dist::Sinusoid{50.0, 20.0, 600.0, 2.0}));
    CHECK_THROWS_AS(dist::validate_load_spec(dist::Sinusoid{10.0, 20.0, 600.0, 0.0}),
                    ConfigError);
    CHECK_THROWS_AS(dist::validate_load_spec(dist::Sinusoid{50.0, 20.0, 0.0, 0.0}),
                    ConfigError);
    CHECK_THROWS_AS(dist::validate_load_spec(dist::Pulse{10.0, 0.0, 50.0, 90.0}),
                    ConfigError);
    CHECK_THROWS_AS(
        dist::validate_load_spec(dist::PiecewiseRandom{50.0, 60.0, 30.0}),
        ConfigError);
    CHECK_THROWS_AS(
        dist::validate_load_spec(dist::PiecewiseRandom{50.0, 20.0, 0.0}),
        ConfigError);
}

TEST_CASE("efficiency spec validation pins (0, 1]") {
    CHECK_NOTHROW(dist::validate_efficiency_spec(dist::Constant{1.0}));
    CHECK_NOTHROW(dist::validate_efficiency_spec(
        dist::PiecewiseRandom{0.9, 0.05, 20.0}));
    CHECK_THROWS_AS(dist::validate_efficiency_spec(dist::Constant{0.0}),
                    ConfigError);
    CHECK_THROWS_AS(dist::validate_efficiency_spec(dist::Constant{1.5}),
                    ConfigError);
    CHECK_THROWS_AS(dist::validate_efficiency_spec(
                        dist::PiecewiseRandom{0.9, 0.95, 20.0}),
                    ConfigError);
    CHECK_THROWS_AS(dist::validate_efficiency_spec(dist::Step{10.0, 0.9, 1.1}),
                    ConfigError);
}
