#pragma once

#include <cstdint>
#include <variant>

namespace hiersim::dist {

// Disturbance signal generators for the offered load and the per-tier
// efficiency. Every value is a pure function of (spec, t, seed, channel),
// so traces are reproducible and channels never perturb one another.

struct Constant {
    double value = 0.0;
};

struct Step {
    double t0 = 0.0;
    double before = 0.0;
    double after = 0.0;
};

struct Pulse {
    double t0 = 0.0;
    double width = 1.0; // seconds the level is held, [t0, t0 + width)
    double base = 0.0;
    double level = 0.0;
};

struct Sinusoid {
    double base = 0.0;
    double amplitude = 0.0;
    double period = 1.0;
    double noise_sigma = 0.0; // stddev of per-sample gaussian noise
};

struct PiecewiseRandom {
    double mean = 0.0;
    double spread = 0.0; // values drawn uniformly in mean +/- spread
    double dwell = 1.0;  // seconds each value is held
};

using DisturbanceSpec =
    std::variant<Constant, Step, Pulse, Sinusoid, PiecewiseRandom>;

// Channel ids keyed into the seeded stream; efficiency channels follow the
// load channel, one per tier.
inline constexpr std::uint64_t kLoadChannel = 0;

constexpr std::uint64_t efficiency_channel(std::size_t tier) {
    return 1 + static_cast<std::uint64_t>(tier);
}

/// Raw signal value at time t.
double gen_signal(const DisturbanceSpec& spec, double t, std::uint64_t seed,
                  std::uint64_t channel);

/// Load sample: raw signal clamped below at 0.
double gen_load(const DisturbanceSpec& spec, double t, std::uint64_t seed,
                std::uint64_t channel);

/// Efficiency sample: raw signal clamped into (0, 1].
double gen_efficiency(const DisturbanceSpec& spec, double t,
                      std::uint64_t seed, std::uint64_t channel);

/// Reject specs whose noiseless range leaves [0, inf) for a load signal.
void validate_load_spec(const DisturbanceSpec& spec);

/// Reject specs whose noiseless range leaves (0, 1] for an efficiency
/// signal.
void validate_efficiency_spec(const DisturbanceSpec& spec);

} // namespace hiersim::dist
