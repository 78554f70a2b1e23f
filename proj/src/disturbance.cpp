#include "hiersim/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hiersim/errors.hpp"
#include "hiersim/rng.hpp"

namespace hiersim::dist {

namespace {

constexpr double kEfficiencyFloor = 1e-6;

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string("non-finite disturbance field ") + field);
    }
}

struct Generate {
    double t;
    std::uint64_t seed;
    std::uint64_t channel;

    double operator()(const Constant& s) const { return s.value; }

    double operator()(const Step& s) const {
        return t < s.t0 ? s.before : s.after;
    }

    double operator()(const Pulse& s) const {
        return (t >= s.t0 && t < s.t0 + s.width) ? s.level : s.base;
    }

    double operator()(const Sinusoid& s) const {
        double v = s.base +
                   s.amplitude *
                       std::sin(2.0 * std::numbers::pi * t / s.period);
        if (s.noise_sigma > 0.0) {
            v += s.noise_sigma *
                 rng::normal01(seed, channel, rng::time_key(t));
        }
        return v;
    }

    double operator()(const PiecewiseRandom& s) const {
        const auto slot = static_cast<std::uint64_t>(
            static_cast<std::int64_t>(std::floor(t / s.dwell)));
        const double u = rng::uniform01(seed, channel, slot);
        return s.mean + s.spread * (2.0 * u - 1.0);
    }
};

} // namespace

double gen_signal(const DisturbanceSpec& spec, double t, std::uint64_t seed,
                  std::uint64_t channel) {
    if (!std::isfinite(t) || t < 0.0) {
        throw SimError("disturbance sampled at negative or non-finite time");
    }
    return std::visit(Generate{t, seed, channel}, spec);
}

double gen_load(const DisturbanceSpec& spec, double t, std::uint64_t seed,
                std::uint64_t channel) {
    return std::max(0.0, gen_signal(spec, t, seed, channel));
}

double gen_efficiency(const DisturbanceSpec& spec, double t,
                      std::uint64_t seed, std::uint64_t channel) {
    return std::clamp(gen_signal(spec, t, seed, channel), kEfficiencyFloor,
                      1.0);
}

namespace {

struct ValidateCommon {
    void operator()(const Constant& s) const {
        require_finite(s.value, "value");
    }
    void operator()(const Step& s) const {
        require_finite(s.t0, "t0");
        require_finite(s.before, "before");
        require_finite(s.after, "after");
        if (s.t0 < 0.0) {
            throw ConfigError("step t0 must be non-negative");
        }
    }
    void operator()(const Pulse& s) const {
        require_finite(s.t0, "t0");
        require_finite(s.width, "width");
        require_finite(s.base, "base");
        require_finite(s.level, "level");
        if (s.t0 < 0.0 || s.width <= 0.0) {
            throw ConfigError("pulse needs t0 >= 0 and width > 0");
        }
    }
    void operator()(const Sinusoid& s) const {
        require_finite(s.base, "base");
        require_finite(s.amplitude, "amplitude");
        require_finite(s.period, "period");
        require_finite(s.noise_sigma, "noise_sigma");
        if (s.period <= 0.0 || s.amplitude < 0.0 || s.noise_sigma < 0.0) {
            throw ConfigError(
                "sinusoid needs period > 0, amplitude >= 0, noise_sigma >= 0");
        }
    }
    void operator()(const PiecewiseRandom& s) const {
        require_finite(s.mean, "mean");
        require_finite(s.spread, "spread");
        require_finite(s.dwell, "dwell");
        if (s.dwell <= 0.0 || s.spread < 0.0) {
            throw ConfigError(
                "piecewise_random needs dwell > 0 and spread >= 0");
        }
    }
};

// Noiseless extremes of the signal; gaussian noise is clamped at
// generation time instead.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct NoiselessRange {
    Range operator()(const Constant& s) const { return {s.value, s.value}; }
    Range operator()(const Step& s) const {
        return {std::min(s.before, s.after), std::max(s.before, s.after)};
    }
    Range operator()(const Pulse& s) const {
        return {std::min(s.base, s.level), std::max(s.base, s.level)};
    }
    Range operator()(const Sinusoid& s) const {
        return {s.base - s.amplitude, s.base + s.amplitude};
    }
    Range operator()(const PiecewiseRandom& s) const {
        return {s.mean - s.spread, s.mean + s.spread};
    }
};

} // namespace

void validate_load_spec(const DisturbanceSpec& spec) {
    std::visit(ValidateCommon{}, spec);
    const Range r = std::visit(NoiselessRange{}, spec);
    if (r.lo < 0.0) {
        throw ConfigError("load disturbance can go negative");
    }
}

void validate_efficiency_spec(const DisturbanceSpec& spec) {
    std::visit(ValidateCommon{}, spec);
    const Range r = std::visit(NoiselessRange{}, spec);
    if (r.lo <= 0.0 || r.hi > 1.0) {
        throw ConfigError("efficiency disturbance must stay within (0, 1]");
    }
}

} // namespace hiersim::dist
