#include "hiersim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiersim/errors.hpp"
#include "hiersim/plant.hpp"

namespace hiersim::sim {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

/// Ratio of two periods, required to be a whole number of steps.
long long step_multiple(double period, double base, const char* field) {
    const double ratio = period / base;
    const double rounded = std::round(ratio);
    require(rounded >= 1.0 &&
                std::abs(ratio - rounded) <= 1e-6 * std::max(1.0, ratio),
            std::string(field) + " must be a positive integer multiple of the finer period");
    return static_cast<long long>(rounded);
}

} // namespace

void validate_config(const ScenarioConfig& config) {
    require(config.n_tiers >= 1, "n_tiers must be at least 1");
    const auto n = static_cast<std::size_t>(config.n_tiers);
    require(config.tiers.size() == n, "tiers must list one entry per tier");
    require(config.efficiency.size() == n,
            "efficiency must list one spec per tier");
    require(std::isfinite(config.duration) && config.duration >= 0.0,
            "duration must be non-negative");
    require(std::isfinite(config.h) && config.h > 0.0, "h must be positive");
    require(config.t_ct >= config.h, "T_ct must be at least h");
    require(config.t_mape >= config.t_ct, "T_mape must be at least T_ct");
    step_multiple(config.t_ct, config.h, "T_ct");
    step_multiple(config.t_mape, config.h, "T_mape");
    step_multiple(config.t_mape, config.t_ct, "T_mape");

    int cu_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tier = config.tiers[i];
        require(tier.cu_max >= 1, "tiers.cu_max must be at least 1");
        require(std::isfinite(tier.rate_per_cu) && tier.rate_per_cu > 0.0,
                "tiers.rate_per_cu must be positive");
        require(tier.kp > 0.0 && tier.ki > 0.0 && tier.tracking_gain > 0.0,
                "tiers.kp, tiers.ki and tiers.tracking_gain must be positive");
        cu_total += tier.cu_max;
    }
    require(cu_total <= config.goal.budget_cap,
            "initial cu_max total exceeds goal.budget_cap");

    // Delegates the goal checks; also resolves the weighted split.
    mape::translate_goals(config.goal, config.n_tiers, config.goal_weights);

    const auto& a = config.analyzer;
    require(std::isfinite(a.theta_up) && std::isfinite(a.theta_down) &&
                a.theta_up > a.theta_down,
            "analyzer.theta_up must exceed analyzer.theta_down");
    require(a.persistence > 0.0, "analyzer.persistence must be positive");
    require(a.fraction > 0.0 && a.fraction <= 1.0,
            "analyzer.fraction must lie in (0, 1]");

    const auto& p = config.planner;
    require(p.margin >= 0.0, "planner.margin must be non-negative");
    require(p.resplit_smooth > 0.0 && p.resplit_smooth < 1.0,
            "planner.resplit_smooth must lie in (0, 1)");
    require(p.r_min > 0.0, "planner.r_min must be positive");
    require(p.weight_floor > 0.0, "planner.weight_floor must be positive");
    require(config.goal.sla_response_time >= p.r_min * config.n_tiers,
            "goal.sla_response_time must cover planner.r_min per tier");

    require(config.window_keep > 0.0, "window_keep must be positive");
    require(config.window_keep >= a.persistence,
            "window_keep must be at least analyzer.persistence");

    const auto& m = config.ml;
    require(std::isfinite(m.period) && m.period > 0.0,
            "ml.period must be positive");
    require(m.bins >= 1, "ml.bins must be at least 1");
    require(m.alpha_r > 0.0 && m.alpha_r < 1.0,
            "ml.alpha_r must lie in (0, 1)");
    require(m.alpha_e > 0.0 && m.alpha_e < 1.0,
            "ml.alpha_e must lie in (0, 1)");
    require(std::isfinite(m.horizon) && m.horizon > 0.0,
            "ml.horizon must be positive");

    dist::validate_load_spec(config.load);
    for (const auto& spec : config.efficiency) {
        dist::validate_efficiency_spec(spec);
    }
}

namespace {

/// Forecast comparison whose realized-load window is still being filled.
struct PendingForecast {
    long long first_step = 0; // first integration step inside the window
    long long last_step = 0;  // one past the last step inside the window
    double seasonal = 0.0;
    double naive = 0.0;
    double load_sum = 0.0;
    long long n = 0;
};

} // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    validate_config(config);
    const auto n = static_cast<std::size_t>(config.n_tiers);
    const long long ct_every = step_multiple(config.t_ct, config.h, "T_ct");
    const long long mape_every =
        step_multiple(config.t_mape, config.h, "T_mape");
    const long long n_steps = std::llround(config.duration / config.h);
    const long long horizon_steps =
        std::max<long long>(1, std::llround(config.ml.horizon / config.h));

    const mape::TechnicalGoals goals = mape::translate_goals(
        config.goal, config.n_tiers, config.goal_weights);

    plant::ChainState chain;
    chain.tiers.resize(n);
    std::vector<ct::PIController> controllers(n);
    std::vector<ml::EfficiencyEstimator> estimators(n);
    std::vector<int> cu_max0(n, 1);
    std::vector<double> rates(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tc = config.tiers[i];
        chain.tiers[i].cu_max = tc.cu_max;
        chain.tiers[i].rate_per_cu = tc.rate_per_cu;
        controllers[i].kp = tc.kp;
        controllers[i].ki = tc.ki;
        controllers[i].tracking_gain = tc.tracking_gain;
        controllers[i].period = config.t_ct;
        controllers[i].setpoint = goals.per_tier_setpoints[i];
        estimators[i].smooth = config.ml.alpha_e;
        cu_max0[i] = tc.cu_max;
        rates[i] = tc.rate_per_cu;
    }
    mape::KnowledgeModel knowledge =
        mape::make_knowledge(goals, cu_max0, rates, config.window_keep);
    ml::SeasonalForecaster forecaster = ml::make_forecaster(
        config.ml.period, config.ml.bins, config.ml.alpha_r);

    RunResult result;
    result.trace.reserve(
        static_cast<std::size_t>(n_steps / std::max(1LL, ct_every) + 1));
    std::vector<double> observed_loads;
    observed_loads.reserve(
        static_cast<std::size_t>(n_steps / std::max(1LL, ct_every) + 1));
    std::vector<PendingForecast> pending;
    std::vector<ForecastSample> forecast_log;
    std::vector<double> needs(n, 0.0);
    double max_mass_drift = 0.0;

    for (long long step = 0; step < n_steps; ++step) {
        const double t0 = static_cast<double>(step) * config.h;
        const double t1 = static_cast<double>(step + 1) * config.h;
        try {
            const double load =
                dist::gen_load(config.load, t0, config.seed,
                               dist::kLoadChannel);
            for (std::size_t i = 0; i < n; ++i) {
                chain.tiers[i].efficiency =
                    dist::gen_efficiency(config.efficiency[i], t0, config.seed,
                                         dist::efficiency_channel(i));
            }

            for (auto& pf : pending) {
                if (step >= pf.first_step && step < pf.last_step) {
                    pf.load_sum += load;
                    pf.n += 1;
                }
            }

            const std::vector<double> queue_before = [&] {
                std::vector<double> q(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    q[i] = chain.tiers[i].queue_level;
                }
                return q;
            }();

            plant::ChainStep advanced = plant::step_chain(chain, load, config.h);
            chain = std::move(advanced.chain);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& obs = advanced.observations[i];
                const double drift =
                    std::abs((chain.tiers[i].queue_level - queue_before[i]) -
                             (obs.inflow - obs.outflow) * config.h);
                max_mass_drift = std::max(max_mass_drift, drift);
            }

            if ((step + 1) % ct_every != 0) {
                continue;
            }

            // CT tick at t1. Efficiency observations must use the
            // allocation that produced this step before new allotments
            // overwrite it.
            if (config.ml_enabled) {
                for (std::size_t i = 0; i < n; ++i) {
                    estimators[i] = ml::update_efficiency(
                        estimators[i], advanced.observations[i],
                        chain.tiers[i].cu_allocated,
                        chain.tiers[i].rate_per_cu);
                    knowledge.eta_hat[i] = estimators[i].eta_hat;
                }
                forecaster = ml::observe_load(forecaster, t1, load);
                observed_loads.push_back(load);
            }

            for (std::size_t i = 0; i < n; ++i) {
                auto& tier = chain.tiers[i];
                const ct::PIUpdate upd =
                    ct::pi_update(controllers[i],
                                  advanced.observations[i].response_time,
                                  static_cast<double>(tier.cu_max));
                controllers[i] = upd.ctrl;
                tier.cu_allocated = upd.cu_allocated;
                needs[i] = ct::need_index(upd.cu_desired,
                                          static_cast<double>(tier.cu_max));
            }
            const double r_end = advanced.end_to_end_response;

            if (config.mape_enabled) {
                mape::monitor(knowledge, t1, needs, advanced.observations,
                              r_end);
            }

            if ((step + 1) % mape_every == 0) {
                mape::accrue_cost(knowledge, config.t_mape, r_end);
                if (config.mape_enabled) {
                    const auto analysis =
                        mape::analyze(knowledge, config.analyzer);
                    knowledge.latest_forecast =
                        config.ml_enabled
                            ? ml::predict_load(forecaster, t1,
                                               config.ml.horizon)
                            : std::nullopt;
                    const mape::AdaptationPlan next =
                        mape::plan(analysis, knowledge,
                                   knowledge.latest_forecast, config.analyzer,
                                   config.planner);
                    mape::execute(next, chain, controllers, knowledge);
                }
                if (config.ml_enabled && t1 >= config.ml.period &&
                    step + 1 + horizon_steps <= n_steps) {
                    const auto forecast =
                        ml::predict_load(forecaster, t1, config.ml.horizon);
                    if (forecast) {
                        PendingForecast pf;
                        pf.first_step = step + 1;
                        pf.last_step = step + 1 + horizon_steps;
                        pf.seasonal = forecast->mean_load;
                        pf.naive = ml::naive_predict(observed_loads);
                        pending.push_back(pf);
                    }
                }
            }

            TraceRecord rec;
            rec.t = t1;
            rec.r_in = load;
            rec.queue.resize(n);
            rec.response_time.resize(n);
            rec.cu_allocated.resize(n);
            rec.cu_max.resize(n);
            rec.need = needs;
            rec.efficiency.resize(n);
            rec.eta_hat = knowledge.eta_hat;
            rec.setpoints = knowledge.goals.per_tier_setpoints;
            for (std::size_t i = 0; i < n; ++i) {
                rec.queue[i] = chain.tiers[i].queue_level;
                rec.response_time[i] = advanced.observations[i].response_time;
                rec.cu_allocated[i] = chain.tiers[i].cu_allocated;
                rec.cu_max[i] = chain.tiers[i].cu_max;
                rec.efficiency[i] = chain.tiers[i].efficiency;
            }
            rec.r_end = r_end;
            rec.accrued_cost = knowledge.accrued_cost;
            rec.reconfig_count = knowledge.reconfig_count;
            result.trace.push_back(std::move(rec));
        } catch (const SimError& e) {
            throw SimError("at t=" + std::to_string(t1) + " (step " +
                           std::to_string(step) + "): " + e.what());
        }
    }

    for (const auto& pf : pending) {
        if (pf.n == pf.last_step - pf.first_step && pf.n > 0) {
            ForecastSample sample;
            sample.t = static_cast<double>(pf.first_step) * config.h;
            sample.seasonal = pf.seasonal;
            sample.naive = pf.naive;
            sample.actual = pf.load_sum / static_cast<double>(pf.n);
            forecast_log.push_back(sample);
        }
    }

    result.summary = summarize(result.trace, goals.end_to_end_target,
                               config.n_tiers, forecast_log, max_mass_drift);
    return result;
}

RunSummary summarize(const std::vector<TraceRecord>& trace,
                     double end_to_end_target, int n_tiers,
                     const std::vector<ForecastSample>& forecast_log,
                     double max_mass_drift) {
    RunSummary s;
    const auto n = static_cast<std::size_t>(std::max(0, n_tiers));
    s.mean_need.assign(n, 0.0);
    s.max_need.assign(n, 0.0);
    s.max_mass_drift = max_mass_drift;
    if (!trace.empty()) {
        long long compliant = 0;
        std::vector<double> sums(n, 0.0);
        std::vector<double> maxima(n, -1e300);
        for (const auto& rec : trace) {
            if (rec.r_end <= end_to_end_target) {
                compliant += 1;
            }
            for (std::size_t i = 0; i < n && i < rec.need.size(); ++i) {
                sums[i] += rec.need[i];
                maxima[i] = std::max(maxima[i], rec.need[i]);
            }
        }
        s.sla_compliance_fraction =
            static_cast<double>(compliant) / static_cast<double>(trace.size());
        for (std::size_t i = 0; i < n; ++i) {
            s.mean_need[i] = sums[i] / static_cast<double>(trace.size());
            s.max_need[i] = maxima[i];
        }
        s.total_cost = trace.back().accrued_cost;
        s.reconfig_count = trace.back().reconfig_count;
    }
    if (!forecast_log.empty()) {
        double fe = 0.0;
        double ne = 0.0;
        for (const auto& p : forecast_log) {
            fe += std::abs(p.seasonal - p.actual);
            ne += std::abs(p.naive - p.actual);
        }
        s.forecaster_mae = fe / static_cast<double>(forecast_log.size());
        s.naive_mae = ne / static_cast<double>(forecast_log.size());
    }
    return s;
}

} // namespace hiersim::sim
