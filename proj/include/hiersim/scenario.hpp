#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hiersim/disturbance.hpp"
#include "hiersim/mape.hpp"
#include "hiersim/ml.hpp"

namespace hiersim::sim {

// Deterministic multirate runner: the plant integrates every h seconds, the
// PI controllers tick every T_ct, and the MAPE loop (plus cost accrual)
// ticks every T_mape. One trace record is emitted per CT tick.

struct TierConfig {
    int cu_max = 10;
    double rate_per_cu = 10.0;
    double kp = 2.0;
    double ki = 0.5;
    double tracking_gain = 0.2; // defaults to 1/(10 * T_ct)
};

struct MlConfig {
    double period = 600.0; // forecaster season length, seconds
    int bins = 24;
    double alpha_r = 0.3;  // residual smoothing
    double alpha_e = 0.2;  // efficiency smoothing
    double horizon = 60.0; // forecast lookahead, defaults to T_mape
};

struct ScenarioConfig {
    int n_tiers = 3;
    double duration = 600.0; // seconds, 0 = degenerate empty run
    double h = 0.05;         // integration step, seconds
    double t_ct = 0.5;       // controller period, seconds
    double t_mape = 60.0;    // supervisor period, seconds
    std::uint64_t seed = 1;
    bool mape_enabled = true;
    bool ml_enabled = true;
    mape::GoalSpec goal;
    std::optional<std::vector<double>> goal_weights;
    std::vector<TierConfig> tiers = std::vector<TierConfig>(3);
    mape::AnalyzerParams analyzer;
    mape::PlannerParams planner;
    double window_keep = 300.0; // knowledge horizon, defaults to 5 * T_mape
    MlConfig ml;
    dist::DisturbanceSpec load = dist::Constant{50.0};
    std::vector<dist::DisturbanceSpec> efficiency =
        std::vector<dist::DisturbanceSpec>(3, dist::Constant{1.0});
};

/// Full invariant check; faults name the offending field and constraint.
void validate_config(const ScenarioConfig& config);

struct TraceRecord {
    double t = 0.0;
    double r_in = 0.0; // load in force during the step ending at t
    std::vector<double> queue;
    std::vector<double> response_time;
    std::vector<double> cu_allocated;
    std::vector<int> cu_max;
    std::vector<double> need;
    std::vector<double> efficiency;
    std::vector<double> eta_hat;
    double r_end = 0.0;
    std::vector<double> setpoints;
    double accrued_cost = 0.0;
    long long reconfig_count = 0;
};

struct RunSummary {
    double sla_compliance_fraction = 0.0;
    double total_cost = 0.0;
    long long reconfig_count = 0;
    std::vector<double> mean_need; // per tier, over the whole trace
    std::vector<double> max_need;
    std::optional<double> forecaster_mae; // absent without logged forecasts
    std::optional<double> naive_mae;
    double max_mass_drift = 0.0; // worst per-step conservation error
};

/// One logged forecast comparison: both predictors against the realized
/// mean load over the same horizon.
struct ForecastSample {
    double t = 0.0;
    double seasonal = 0.0;
    double naive = 0.0;
    double actual = 0.0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

RunResult run_scenario(const ScenarioConfig& config);

RunSummary summarize(const std::vector<TraceRecord>& trace,
                     double end_to_end_target, int n_tiers,
                     const std::vector<ForecastSample>& forecast_log,
                     double max_mass_drift);

} // namespace hiersim::sim
