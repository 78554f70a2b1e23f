#include "doctest.h"

#include <cmath>
#include <limits>

#include "hiersim/ct.hpp"
#include "hiersim/errors.hpp"
#include "hiersim/rng.hpp"

using namespace hiersim;

TEST_CASE("pi_update at zero error passes the integral through") {
    ct::PIController c;
    c.integral = 4.0;
    const auto r = ct::pi_update(c, c.setpoint, 10.0);
    CHECK(r.cu_desired == doctest::Approx(4.0));
    CHECK(r.cu_allocated == doctest::Approx(4.0));
    CHECK(r.ctrl.integral == doctest::Approx(4.0));
}

TEST_CASE("pi_update worked step") {
    ct::PIController c;
    c.kp = 2.0;
    c.ki = 0.5;
    c.tracking_gain = 0.2;
    c.period = 0.5;
    c.setpoint = 0.5;
    c.integral = 0.0;
    const auto r = ct::pi_update(c, 1.0, 10.0);
    CHECK(r.cu_desired == doctest::Approx(1.0));
    CHECK(r.cu_allocated == doctest::Approx(1.0));
    CHECK(r.ctrl.integral == doctest::Approx(0.125));
    CHECK(r.ctrl.last_cu_desired == doctest::Approx(1.0));
    CHECK(r.ctrl.last_cu_allocated == doctest::Approx(1.0));
}

TEST_CASE("saturated controller settles at a bounded demand") {
    // Constant error e with the output pinned at cu_max: the back-calculation
    // term balances the integral accumulation at
    // cu_desired = cu_max + (ki / tracking_gain) * e.
    ct::PIController c;
    c.setpoint = 0.3;
    const double e = 0.4;
    const double cu_max = 10.0;
    double desired = 0.0;
    double allocated = 0.0;
    for (int i = 0; i < 400; ++i) {
        const auto r = ct::pi_update(c, c.setpoint + e, cu_max);
        c = r.ctrl;
        desired = r.cu_desired;
        allocated = r.cu_allocated;
    }
    CHECK(allocated == doctest::Approx(cu_max));
    CHECK(desired == doctest::Approx(cu_max + (c.ki / c.tracking_gain) * e).epsilon(1e-9));
}

TEST_CASE("allocation is always clamped to the available range") {
    ct::PIController c;
    for (int i = 0; i < 2000; ++i) {
        const double measured = 5.0 * rng::uniform01(11, 1, static_cast<std::uint64_t>(i));
        const double avail = 1.0 + 19.0 * rng::uniform01(11, 2, static_cast<std::uint64_t>(i));
        const auto r = ct::pi_update(c, measured, avail);
        CHECK(r.cu_allocated >= 0.0);
        CHECK(r.cu_allocated <= avail);
        c = r.ctrl;
    }
}

TEST_CASE("anti-windup keeps the integral bounded under persistent saturation") {
    ct::PIController c;
    const double e = 2.0;
    const double cu_max = 5.0;
    const double bound = cu_max + (c.kp + c.ki / c.tracking_gain) * e;
    for (int i = 0; i < 10000; ++i) {
        const auto r = ct::pi_update(c, c.setpoint + e, cu_max);
        c = r.ctrl;
        CHECK(std::abs(c.integral) <= bound + 1e-9);
    }
}

TEST_CASE("unsaturated zero error is a fixed point") {
    ct::PIController c;
    c.integral = 3.0;
    for (int i = 0; i < 50; ++i) {
        const auto r = ct::pi_update(c, c.setpoint, 10.0);
        CHECK(r.cu_desired == doctest::Approx(3.0));
        CHECK(r.ctrl.integral == doctest::Approx(3.0));
        c = r.ctrl;
    }
}

TEST_CASE("pi_update input validation") {
    ct::PIController c;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ct::pi_update(c, nan, 10.0), SimError);
    CHECK_THROWS_AS(ct::pi_update(c, 0.3, 0.5), SimError); // below one CU
    ct::PIController bad = c;
    bad.period = 0.0;
    CHECK_THROWS_AS(ct::pi_update(bad, 0.3, 10.0), SimError);
}

TEST_CASE("need_index identities") {
    for (double x : {1.0, 8.0, 64.0}) {
        CHECK(ct::need_index(x, x) == 0.0);
        CHECK(ct::need_index(2.0 * x, x) == 1.0);
        CHECK(ct::need_index(0.5 * x, x) == -0.5);
    }
    CHECK(ct::need_index(12.0, 8.0) == doctest::Approx(0.5));
    CHECK(ct::need_index(4.0, 8.0) == doctest::Approx(-0.5));
}

TEST_CASE("need_index grows with demand") {
    double prev = ct::need_index(0.0, 8.0);
    for (double d = 1.0; d <= 32.0; d += 1.0) {
        const double cur = ct::need_index(d, 8.0);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(ct::need_index(4.0, 0.0), SimError);
}

TEST_CASE("update_setpoint keeps controller state") {
    ct::PIController c;
    c.integral = 5.0;
    c.setpoint = 0.33;
    const auto moved = ct::update_setpoint(c, 0.40);
    CHECK(moved.setpoint == 0.40);
    CHECK(moved.integral == 5.0);
    CHECK(moved.kp == c.kp);
    const auto same = ct::update_setpoint(c, 0.33);
    CHECK(same.setpoint == c.setpoint);
    CHECK(same.integral == c.integral);
    CHECK_THROWS_AS(ct::update_setpoint(c, 0.0), SimError);
    CHECK_THROWS_AS(ct::update_setpoint(c, -1.0), SimError);
}
