#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "hiersim/errors.hpp"
#include "hiersim/plant.hpp"
#include "hiersim/rng.hpp"

using namespace hiersim;

namespace {

plant::TierState make_tier(double queue, double cu, double eta, double mu) {
    plant::TierState s;
    s.queue_level = queue;
    s.cu_allocated = cu;
    s.efficiency = eta;
    s.rate_per_cu = mu;
    return s;
}

} // namespace

TEST_CASE("capacity is cu times efficiency times rate") {
    CHECK(plant::capacity(make_tier(0.0, 1.0, 0.5, 10.0)) == doctest::Approx(5.0));
    CHECK(plant::capacity(make_tier(0.0, 5.0, 1.0, 10.0)) == doctest::Approx(50.0));
    CHECK(plant::capacity(make_tier(0.0, 0.0, 1.0, 10.0)) == 0.0);
}

TEST_CASE("step_tier drains at capacity when overloaded") {
    const auto r = plant::step_tier(make_tier(0.0, 1.0, 0.5, 10.0), 10.0, 0.1);
    CHECK(r.obs.capacity == doctest::Approx(5.0));
    CHECK(r.obs.outflow == doctest::Approx(5.0));
    CHECK(r.state.queue_level == doctest::Approx(0.5));
}

TEST_CASE("step_tier with no work stays idle") {
    const auto r = plant::step_tier(make_tier(0.0, 1.0, 0.5, 10.0), 0.0, 0.1);
    CHECK(r.obs.outflow == 0.0);
    CHECK(r.state.queue_level == 0.0);
}

TEST_CASE("step_tier with zero capacity only accumulates") {
    const auto r = plant::step_tier(make_tier(3.0, 0.0, 1.0, 10.0), 2.0, 0.1);
    CHECK(r.obs.outflow == 0.0);
    CHECK(r.state.queue_level == doctest::Approx(3.2));
}

TEST_CASE("step_tier preserves static fields") {
    auto s = make_tier(1.0, 2.0, 0.8, 12.0);
    s.cu_max = 7;
    const auto r = plant::step_tier(s, 4.0, 0.05);
    CHECK(r.state.cu_allocated == 2.0);
    CHECK(r.state.cu_max == 7);
    CHECK(r.state.efficiency == 0.8);
    CHECK(r.state.rate_per_cu == 12.0);
}

TEST_CASE("estimate_response_time follows (q+1)/capacity") {
    CHECK(plant::estimate_response_time(make_tier(0.0, 1.0, 1.0, 10.0)) ==
          doctest::Approx(0.1));
    CHECK(plant::estimate_response_time(make_tier(49.0, 5.0, 1.0, 10.0)) ==
          doctest::Approx(1.0));
}

TEST_CASE("estimate_response_time caps when capacity vanishes") {
    CHECK(plant::estimate_response_time(make_tier(5.0, 0.0, 1.0, 10.0)) ==
          plant::kResponseTimeCap);
    // Large but real capacity is never capped.
    CHECK(plant::estimate_response_time(make_tier(1e6, 10.0, 1.0, 10.0)) ==
          doctest::Approx((1e6 + 1.0) / 100.0));
}

TEST_CASE("step_chain on an idle chain changes nothing") {
    plant::ChainState chain;
    for (int i = 0; i < 3; ++i) chain.tiers.push_back(make_tier(0.0, 5.0, 1.0, 10.0));
    const auto r = plant::step_chain(chain, 0.0, 0.1);
    for (const auto& t : r.chain.tiers) CHECK(t.queue_level == 0.0);
    for (const auto& o : r.observations) CHECK(o.outflow == 0.0);
    CHECK(r.end_to_end_response == doctest::Approx(3.0 / 50.0));
}

TEST_CASE("step_chain with one tier matches step_tier") {
    plant::ChainState chain;
    chain.tiers.push_back(make_tier(2.0, 1.5, 0.9, 10.0));
    const auto c = plant::step_chain(chain, 7.0, 0.05);
    const auto t = plant::step_tier(chain.tiers[0], 7.0, 0.05);
    CHECK(c.chain.tiers[0].queue_level == t.state.queue_level);
    CHECK(c.observations[0].outflow == t.obs.outflow);
    CHECK(c.end_to_end_response == t.obs.response_time);
}

TEST_CASE("step_chain feeds each tier the previous outflow") {
    plant::ChainState chain;
    for (int i = 0; i < 3; ++i) chain.tiers.push_back(make_tier(0.0, 5.0, 1.0, 10.0));
    const auto r = plant::step_chain(chain, 50.0, 0.1);
    for (const auto& o : r.observations) {
        CHECK(o.outflow == doctest::Approx(50.0));
    }
    CHECK(r.observations[1].inflow == r.observations[0].outflow);
    CHECK(r.observations[2].inflow == r.observations[1].outflow);
    for (const auto& t : r.chain.tiers) CHECK(t.queue_level == doctest::Approx(0.0));
    CHECK(r.end_to_end_response == doctest::Approx(0.06));
}

TEST_CASE("step_tier rejects non-finite inputs") {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(plant::step_tier(make_tier(0, 1, 1, 10), inf, 0.1), SimError);
    CHECK_THROWS_AS(plant::step_tier(make_tier(nan, 1, 1, 10), 1.0, 0.1), SimError);
    CHECK_THROWS_WITH_AS(plant::step_tier(make_tier(0, 1, 1, 10), nan, 0.1),
                         doctest::Contains("inflow"), SimError);
}

TEST_CASE("queue stays non-negative and outflow within capacity") {
    // Deterministic pseudo-random walk over inflows and allocations.
    auto s = make_tier(0.0, 3.0, 1.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        s.cu_allocated = 10.0 * rng::uniform01(42, 1, static_cast<std::uint64_t>(i));
        s.efficiency = 0.2 + 0.8 * rng::uniform01(42, 2, static_cast<std::uint64_t>(i));
        const double inflow = 80.0 * rng::uniform01(42, 3, static_cast<std::uint64_t>(i));
        const double dt = 0.05;
        const auto r = plant::step_tier(s, inflow, dt);
        CHECK(r.state.queue_level >= 0.0);
        CHECK(r.obs.outflow >= 0.0);
        CHECK(r.obs.outflow <= r.obs.capacity + 1e-12);
        s = r.state;
    }
}

TEST_CASE("mass is conserved step by step") {
    auto s = make_tier(5.0, 3.0, 1.0, 10.0);
    const double dt = 0.05;
    double stored = s.queue_level;
    double in_total = 0.0;
    double out_total = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double inflow = 60.0 * rng::uniform01(7, 1, static_cast<std::uint64_t>(i));
        const auto r = plant::step_tier(s, inflow, dt);
        const double drift =
            std::abs((r.state.queue_level - s.queue_level) - (inflow - r.obs.outflow) * dt);
        CHECK(drift < 1e-9);
        in_total += inflow * dt;
        out_total += r.obs.outflow * dt;
        s = r.state;
    }
    CHECK(s.queue_level == doctest::Approx(stored + in_total - out_total).epsilon(1e-9));
}

TEST_CASE("more CU never leaves a longer queue") {
    for (int i = 0; i < 500; ++i) {
        const double q = 20.0 * rng::uniform01(9, 1, static_cast<std::uint64_t>(i));
        const double inflow = 100.0 * rng::uniform01(9, 2, static_cast<std::uint64_t>(i));
        const double lo = 8.0 * rng::uniform01(9, 3, static_cast<std::uint64_t>(i));
        const double hi = lo + 5.0 * rng::uniform01(9, 4, static_cast<std::uint64_t>(i));
        const auto a = plant::step_tier(make_tier(q, lo, 1.0, 10.0), inflow, 0.05);
        const auto b = plant::step_tier(make_tier(q, hi, 1.0, 10.0), inflow, 0.05);
        CHECK(b.state.queue_level <= a.state.queue_level + 1e-12);
    }
}

TEST_CASE("a backlogged tier at matched capacity holds its queue") {
    // inflow equal to capacity with work queued: drain runs at capacity and
    // the queue level is a fixed point.
    auto s = make_tier(14.0, 5.0, 1.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        const auto r = plant::step_tier(s, 50.0, 0.05);
        CHECK(r.state.queue_level == doctest::Approx(14.0));
        CHECK(r.obs.outflow == doctest::Approx(50.0));
        s = r.state;
    }
}
