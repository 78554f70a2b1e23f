#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hiersim::rng {

// Counter-based random values: every draw is a pure function of
// (seed, channel, key), so disturbance channels are independent of one
// another and of evaluation order, and adding a channel never perturbs
// the values of an existing one.

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t channel,
                                std::uint64_t key, std::uint64_t slot = 0) {
    std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL);
    x = mix64(x ^ mix64(channel + 0x1000000000000001ULL));
    x = mix64(x ^ mix64(key));
    return mix64(x + slot * 0x9e3779b97f4a7c15ULL);
}

inline std::uint64_t time_key(double t) {
    return std::bit_cast<std::uint64_t>(t);
}

/// Uniform draw in (0, 1), never returning 0 or 1 exactly.
inline double uniform01(std::uint64_t seed, std::uint64_t channel,
                        std::uint64_t key, std::uint64_t slot = 0) {
    const std::uint64_t bits = combine(seed, channel, key, slot);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller on two counter slots.
inline double normal01(std::uint64_t seed, std::uint64_t channel,
                       std::uint64_t key) {
    const double u1 = uniform01(seed, channel, key, 0);
    const double u2 = uniform01(seed, channel, key, 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace hiersim::rng
