#include "hiersim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiersim/errors.hpp"

namespace hiersim::plant {

namespace {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw SimError(std::string("non-finite ") + field);
    }
}

} // namespace

double capacity(const TierState& state) {
    return state.cu_allocated * state.efficiency * state.rate_per_cu;
}

double estimate_response_time(const TierState& state) {
    const double c = capacity(state);
    if (c <= kCapacityEpsilon) {
        return kResponseTimeCap;
    }
    return (state.queue_level + 1.0) / c;
}

TierStep step_tier(const TierState& state, double inflow, double dt) {
    require_finite(state.queue_level, "queue_level");
    require_finite(state.cu_allocated, "cu_allocated");
    require_finite(state.efficiency, "efficiency");
    require_finite(state.rate_per_cu, "rate_per_cu");
    require_finite(inflow, "inflow");
    require_finite(dt, "dt");
    if (dt <= 0.0) {
        throw SimError("step_tier: dt must be positive");
    }
    if (inflow < 0.0) {
        throw SimError("step_tier: negative inflow");
    }

    const double c = capacity(state);
    const double drain = std::min(c, inflow + state.queue_level / dt);

    TierStep result;
    result.state = state;
    result.state.queue_level =
        std::max(0.0, state.queue_level + (inflow - drain) * dt);

    result.obs.inflow = inflow;
    result.obs.outflow = drain;
    result.obs.queue_level = result.state.queue_level;
    result.obs.response_time = estimate_response_time(result.state);
    result.obs.capacity = c;
    return result;
}

ChainStep step_chain(const ChainState& chain, double r_in, double dt) {
    ChainStep result;
    result.chain = chain;
    result.observations.reserve(chain.tiers.size());

    double inflow = r_in;
    for (auto& tier : result.chain.tiers) {
        TierStep step = step_tier(tier, inflow, dt);
        tier = step.state;
        inflow = step.obs.outflow;
        result.end_to_end_response += step.obs.response_time;
        result.observations.push_back(step.obs);
    }
    return result;
}

} // namespace hiersim::plant
