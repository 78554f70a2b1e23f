#include "hiersim/ml.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hiersim/errors.hpp"

namespace hiersim::ml {

namespace {

constexpr double kCuEpsilon = 1e-9;

void check_shape(const SeasonalForecaster& f) {
    if (f.period <= 0.0 || f.bins < 1 ||
        f.bin_means.size() != static_cast<std::size_t>(f.bins) ||
        f.bin_counts.size() != static_cast<std::size_t>(f.bins)) {
        throw SimError("malformed forecaster state");
    }
}

} // namespace

SeasonalForecaster make_forecaster(double period, int bins,
                                   double residual_smooth) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw ConfigError("forecaster period must be positive");
    }
    if (bins < 1) {
        throw ConfigError("forecaster bins must be at least 1");
    }
    if (!(residual_smooth > 0.0) || !(residual_smooth < 1.0)) {
        throw ConfigError("residual smoothing weight must lie in (0, 1)");
    }
    SeasonalForecaster f;
    f.period = period;
    f.bins = bins;
    f.residual_smooth = residual_smooth;
    f.bin_means.assign(static_cast<std::size_t>(bins), 0.0);
    f.bin_counts.assign(static_cast<std::size_t>(bins), 0);
    return f;
}

int bin_index(const SeasonalForecaster& f, double t) {
    check_shape(f);
    if (!std::isfinite(t)) {
        throw SimError("non-finite sample time");
    }
    double phase = std::fmod(t, f.period);
    if (phase < 0.0) {
        phase += f.period;
    }
    const int idx = static_cast<int>(std::floor(phase / f.period * f.bins));
    return std::clamp(idx, 0, f.bins - 1);
}

SeasonalForecaster observe_load(const SeasonalForecaster& f, double t,
                                double load) {
    if (!std::isfinite(load) || load < 0.0) {
        throw SimError("negative or non-finite load sample");
    }
    const int b = bin_index(f, t);
    SeasonalForecaster out = f;
    auto& count = out.bin_counts[static_cast<std::size_t>(b)];
    auto& mean = out.bin_means[static_cast<std::size_t>(b)];
    count += 1;
    mean += (load - mean) / static_cast<double>(count);
    const double residual = load - mean;
    out.last_residual = out.residual_smooth * residual +
                        (1.0 - out.residual_smooth) * out.last_residual;
    return out;
}

std::optional<Forecast> predict_load(const SeasonalForecaster& f, double t_now,
                                     double horizon) {
    check_shape(f);
    if (!std::isfinite(t_now) || t_now < 0.0) {
        throw SimError("non-finite or negative forecast start");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw SimError("forecast horizon must be positive");
    }

    const double bin_width = f.period / f.bins;
    const auto first_slot = static_cast<std::int64_t>(std::floor(t_now / bin_width));
    const double end = t_now + horizon;
    auto last_slot = static_cast<std::int64_t>(std::floor(end / bin_width));
    if (static_cast<double>(last_slot) * bin_width == end) {
        last_slot -= 1; // window is half-open; a boundary end excludes the next bin
    }
    last_slot = std::min(last_slot, first_slot + f.bins - 1);

    double sum = 0.0;
    double peak = 0.0;
    int trained = 0;
    for (std::int64_t s = first_slot; s <= last_slot; ++s) {
        const auto b = static_cast<std::size_t>(s % f.bins);
        if (f.bin_counts[b] == 0) {
            continue;
        }
        const double v = std::max(0.0, f.bin_means[b] + f.last_residual);
        sum += v;
        peak = std::max(peak, v);
        trained += 1;
    }

    if (trained == 0) {
        double total = 0.0;
        int n = 0;
        for (int b = 0; b < f.bins; ++b) {
            if (f.bin_counts[static_cast<std::size_t>(b)] > 0) {
                total += f.bin_means[static_cast<std::size_t>(b)];
                n += 1;
            }
        }
        if (n == 0) {
            return std::nullopt;
        }
        const double v = std::max(0.0, total / n + f.last_residual);
        return Forecast{horizon, v, v};
    }

    return Forecast{horizon, sum / trained, peak};
}

EfficiencyEstimator update_efficiency(const EfficiencyEstimator& e,
                                      const plant::TierObservation& tier_obs,
                                      double cu_allocated, double rate_per_cu) {
    if (tier_obs.queue_level <= 0.0 || cu_allocated <= kCuEpsilon ||
        rate_per_cu <= 0.0) {
        return e; // unsaturated; throughput does not reveal capacity
    }
    double eta_obs = tier_obs.outflow / (cu_allocated * rate_per_cu);
    if (!std::isfinite(eta_obs) || eta_obs <= 0.0) {
        return e;
    }
    eta_obs = std::min(eta_obs, 1.0);
    EfficiencyEstimator out = e;
    out.eta_hat = e.smooth * eta_obs + (1.0 - e.smooth) * e.eta_hat;
    return out;
}

double naive_predict(const std::vector<double>& history) {
    if (history.empty()) {
        throw SimError("empty load history");
    }
    return history.back();
}

} // namespace hiersim::ml
