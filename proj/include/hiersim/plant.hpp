#pragma once

#include <vector>

namespace hiersim::plant {

// Fluid model of one application tier: requests flow through a queue drained
// by a server whose speed is proportional to the Computational Units it holds.

struct TierState {
    double queue_level = 0.0;  // requests, >= 0
    double cu_allocated = 0.0; // CU, in [0, cu_max]
    int cu_max = 10;           // provisioned CU ceiling, >= 1
    double efficiency = 1.0;   // in (0, 1]; carries the interference disturbance
    double rate_per_cu = 10.0; // requests/second served by one CU at efficiency 1
};

struct TierObservation {
    double inflow = 0.0;        // requests/second offered this step
    double outflow = 0.0;       // requests/second drained this step
    double queue_level = 0.0;   // requests, after the step
    double response_time = 0.0; // seconds, after the step
    double capacity = 0.0;      // requests/second available this step
};

struct ChainState {
    std::vector<TierState> tiers; // tier i feeds tier i+1
};

// Below this capacity the response-time estimate is capped rather than
// allowed to blow up.
inline constexpr double kCapacityEpsilon = 1e-6; // requests/second
inline constexpr double kResponseTimeCap = 100.0; // seconds

/// Current service rate: cu_allocated * efficiency * rate_per_cu.
double capacity(const TierState& state);

/// Time to drain the queue plus one service time, (q + 1) / capacity,
/// or kResponseTimeCap when capacity is at or below kCapacityEpsilon.
double estimate_response_time(const TierState& state);

struct TierStep {
    TierState state;
    TierObservation obs;
};

/// Advance one tier by dt seconds under the given inflow. The drain rate is
/// min(capacity, inflow + queue/dt), so the queue never goes negative and
/// outflow never exceeds capacity.
TierStep step_tier(const TierState& state, double inflow, double dt);

struct ChainStep {
    ChainState chain;
    std::vector<TierObservation> observations;
    double end_to_end_response = 0.0; // sum of per-tier response times
};

/// Advance the whole chain: tier 0 receives r_in, tier i receives tier i-1's
/// outflow of the same step.
ChainStep step_chain(const ChainState& chain, double r_in, double dt);

} // namespace hiersim::plant
