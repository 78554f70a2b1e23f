#pragma once

#include <optional>
#include <vector>

#include "hiersim/plant.hpp"

namespace hiersim::ml {

// Online learners for the two modelled uncertainties: a seasonal load
// forecaster (binned running means over a fixed period, plus a smoothed
// residual for level shifts) and a per-tier efficiency estimator.

struct SeasonalForecaster {
    double period = 600.0;         // seconds per season
    int bins = 24;                 // bins per season
    double residual_smooth = 0.3;  // weight of the newest residual
    std::vector<double> bin_means; // requests/second, one per bin
    std::vector<long long> bin_counts;
    double last_residual = 0.0; // requests/second
};

/// Sized, zeroed forecaster. Faults on non-positive period/bins or a
/// smoothing weight outside (0, 1).
SeasonalForecaster make_forecaster(double period, int bins,
                                   double residual_smooth);

/// Bin holding time t: floor((t mod period) / period * bins).
int bin_index(const SeasonalForecaster& f, double t);

/// Fold one load sample into its bin's running mean, then smooth the
/// residual against the updated mean.
SeasonalForecaster observe_load(const SeasonalForecaster& f, double t,
                                double load);

struct Forecast {
    double horizon = 0.0;   // seconds
    double mean_load = 0.0; // requests/second
    double peak_load = 0.0; // requests/second, >= mean_load
};

/// Forecast over [t_now, t_now + horizon): mean and max of (bin_mean +
/// last_residual) across the trained bins the window covers, floored at 0.
/// Untrained bins in the window are skipped; if none in the window are
/// trained the global mean of all trained bins stands in; with no trained
/// bins at all there is no forecast.
std::optional<Forecast> predict_load(const SeasonalForecaster& f, double t_now,
                                     double horizon);

struct EfficiencyEstimator {
    double eta_hat = 1.0; // in (0, 1]
    double smooth = 0.2;  // weight of the newest observation
};

/// Exponential-smoothing update from one tier step. Only a capacity-limited
/// step (queue still backed up, CUs allotted) reveals the true service rate;
/// any other step leaves the estimate unchanged.
EfficiencyEstimator update_efficiency(const EfficiencyEstimator& e,
                                      const plant::TierObservation& tier_obs,
                                      double cu_allocated, double rate_per_cu);

/// Last-value baseline forecast. Faults on an empty history.
double naive_predict(const std::vector<double>& history);

} // namespace hiersim::ml
