#include "hiersim/mape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hiersim/errors.hpp"

namespace hiersim::mape {

namespace {

constexpr double kTimeSlack = 1e-9;    // tolerance on window boundaries
constexpr double kSetpointTol = 1e-9;  // tolerance on set-point sums

std::size_t tier_count(const KnowledgeModel& k) {
    return k.current_cu_max.size();
}

/// Mean of the samples within the trailing `horizon` seconds of a window.
double trailing_mean(const std::deque<Sample>& window, double horizon) {
    if (window.empty()) {
        throw SimError("empty knowledge window");
    }
    const double cutoff = window.back().t - horizon - kTimeSlack;
    double sum = 0.0;
    int n = 0;
    for (auto it = window.rbegin(); it != window.rend(); ++it) {
        if (it->t < cutoff) {
            break;
        }
        sum += it->value;
        n += 1;
    }
    return sum / n;
}

int checked_sum(const std::vector<int>& cu_max) {
    return std::accumulate(cu_max.begin(), cu_max.end(), 0);
}

} // namespace

TechnicalGoals translate_goals(const GoalSpec& spec, int n_tiers,
                               const std::optional<std::vector<double>>& weights) {
    if (n_tiers < 1) {
        throw ConfigError("tier count must be at least 1");
    }
    if (!(spec.sla_response_time > 0.0) ||
        !std::isfinite(spec.sla_response_time)) {
        throw ConfigError("sla_response_time must be positive");
    }
    if (spec.budget_cap < n_tiers) {
        throw ConfigError("budget_cap must be at least the tier count");
    }
    if (spec.penalty_rate < 0.0 || spec.cu_price < 0.0) {
        throw ConfigError("penalty_rate and cu_price must be non-negative");
    }

    std::vector<double> w(static_cast<std::size_t>(n_tiers), 1.0);
    if (weights) {
        if (weights->size() != static_cast<std::size_t>(n_tiers)) {
            throw ConfigError("goal weights must list one entry per tier");
        }
        for (double v : *weights) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError("goal weights must be positive");
            }
        }
        w = *weights;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);

    TechnicalGoals goals;
    goals.end_to_end_target = spec.sla_response_time;
    goals.budget_cap = spec.budget_cap;
    goals.penalty_rate = spec.penalty_rate;
    goals.cu_price = spec.cu_price;
    goals.per_tier_setpoints.reserve(w.size());
    for (double v : w) {
        goals.per_tier_setpoints.push_back(spec.sla_response_time * v / total);
    }
    return goals;
}

KnowledgeModel make_knowledge(const TechnicalGoals& goals,
                              const std::vector<int>& cu_max,
                              const std::vector<double>& rate_per_cu,
                              double window_keep) {
    const std::size_t n = goals.per_tier_setpoints.size();
    if (n == 0 || cu_max.size() != n || rate_per_cu.size() != n) {
        throw ConfigError("knowledge model needs one entry per tier");
    }
    if (!(window_keep > 0.0)) {
        throw ConfigError("window_keep must be positive");
    }
    for (int c : cu_max) {
        if (c < 1) {
            throw ConfigError("cu_max must be at least 1");
        }
    }
    if (checked_sum(cu_max) > goals.budget_cap) {
        throw ConfigError("initial cu_max total exceeds budget_cap");
    }
    for (double r : rate_per_cu) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ConfigError("rate_per_cu must be positive");
        }
    }

    KnowledgeModel k;
    k.need_history.resize(n);
    k.response_history.resize(n);
    k.current_cu_max = cu_max;
    k.goals = goals;
    k.eta_hat.assign(n, 1.0);
    k.rate_per_cu = rate_per_cu;
    k.smoothed_response.assign(n, 0.0);
    k.window_keep = window_keep;
    return k;
}

void monitor(KnowledgeModel& k, double t, const std::vector<double>& needs,
             const std::vector<plant::TierObservation>& observations,
             double r_end) {
    const std::size_t n = tier_count(k);
    if (needs.size() != n || observations.size() != n) {
        throw SimError("monitor sample count does not match tier count");
    }
    if (!k.end_response_history.empty() &&
        t < k.end_response_history.back().t) {
        throw SimError("monitor samples out of order");
    }

    const double cutoff = t - k.window_keep;
    auto trim = [cutoff](std::deque<Sample>& window) {
        while (!window.empty() && window.front().t < cutoff) {
            window.pop_front();
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        k.need_history[i].push_back({t, needs[i]});
        k.response_history[i].push_back({t, observations[i].response_time});
        trim(k.need_history[i]);
        trim(k.response_history[i]);
    }
    k.end_response_history.push_back({t, r_end});
    trim(k.end_response_history);
}

std::vector<Classification> analyze(const KnowledgeModel& k,
                                    const AnalyzerParams& params) {
    const std::size_t n = tier_count(k);
    std::vector<Classification> out(n, Classification::Ok);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& window = k.need_history[i];
        if (window.empty()) {
            throw SimError("analyze needs at least one sample per tier");
        }
        const double newest = window.back().t;
        const bool span_ok =
            newest - window.front().t >= params.persistence - kTimeSlack;

        const double cutoff = newest - params.persistence - kTimeSlack;
        int total = 0;
        int over = 0;
        int under = 0;
        for (auto it = window.rbegin(); it != window.rend(); ++it) {
            if (it->t < cutoff) {
                break;
            }
            total += 1;
            if (it->value > params.theta_up) {
                over += 1;
            }
            if (it->value < params.theta_down) {
                under += 1;
            }
        }

        const double frac_over = static_cast<double>(over) / total;
        const double frac_under = static_cast<double>(under) / total;
        if (span_ok && frac_over >= params.fraction) {
            out[i] = Classification::SustainedOverload;
        } else if (over > 0) {
            out[i] = Classification::TransientOverload;
        } else if (span_ok && frac_under >= params.fraction) {
            out[i] = Classification::SustainedUnderuse;
        }
    }
    return out;
}

namespace {

/// Unit cuts in ascending mean need (ties to the lower tier index), never
/// below the per-tier floor, until the total fits the budget or every tier
/// sits at its floor.
void cut_to_budget(std::vector<int>& want, const std::vector<double>& mean_need,
                   const std::vector<int>& floor, int budget) {
    while (checked_sum(want) > budget) {
        int pick = -1;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (want[i] <= floor[i]) {
                continue;
            }
            if (pick < 0 ||
                mean_need[i] < mean_need[static_cast<std::size_t>(pick)]) {
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) {
            return;
        }
        want[static_cast<std::size_t>(pick)] -= 1;
    }
}

} // namespace

std::vector<int> repair_budget(std::vector<int> want,
                               const std::vector<double>& mean_need,
                               const std::vector<int>& current,
                               int budget_cap) {
    const std::size_t n = want.size();
    if (mean_need.size() != n || current.size() != n) {
        throw SimError("budget repair needs one entry per tier");
    }
    std::vector<int> floor_current(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        floor_current[i] = std::min(want[i], current[i]);
    }
    cut_to_budget(want, mean_need, floor_current, budget_cap);
    cut_to_budget(want, mean_need, std::vector<int>(n, 1), budget_cap);
    return want;
}

std::vector<double> resplit_setpoints(const std::vector<double>& w,
                                      double target, double r_min) {
    const std::size_t n = w.size();
    if (target < r_min * static_cast<double>(n) - kSetpointTol) {
        throw SimError("end-to-end target below the per-tier minimum total");
    }
    std::vector<bool> pinned(n, false);
    std::vector<double> out(n, 0.0);
    for (std::size_t round = 0; round < n; ++round) {
        double free_weight = 0.0;
        int n_pinned = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) {
                n_pinned += 1;
            } else {
                free_weight += w[i];
            }
        }
        const double remaining = target - r_min * n_pinned;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) {
                out[i] = r_min;
                continue;
            }
            out[i] = remaining * w[i] / free_weight;
            if (out[i] < r_min) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
    return out;
}

AdaptationPlan plan(const std::vector<Classification>& analysis,
                    KnowledgeModel& k,
                    const std::optional<ml::Forecast>& forecast,
                    const AnalyzerParams& analyzer,
                    const PlannerParams& params) {
    const std::size_t n = tier_count(k);
    if (analysis.size() != n) {
        throw SimError("analysis does not cover every tier");
    }
    if (k.goals.budget_cap < static_cast<int>(n)) {
        throw SimError("budget_cap below tier count");
    }

    std::vector<double> mean_need(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        mean_need[i] = trailing_mean(k.need_history[i], analyzer.persistence);
    }

    // Smoothed response means update on every plan call so the re-split
    // weights track the plant even across no-op periods.
    for (std::size_t i = 0; i < n; ++i) {
        const double recent = k.response_history[i].empty()
                                  ? k.goals.per_tier_setpoints[i]
                                  : trailing_mean(k.response_history[i],
                                                  analyzer.persistence);
        if (k.smoothed_response[i] <= 0.0) {
            k.smoothed_response[i] = recent;
        } else {
            k.smoothed_response[i] =
                params.resplit_smooth * recent +
                (1.0 - params.resplit_smooth) * k.smoothed_response[i];
        }
    }

    const double grow = 1.0 + params.margin;
    std::vector<int> want(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int current = k.current_cu_max[i];
        switch (analysis[i]) {
        case Classification::SustainedOverload:
        case Classification::SustainedUnderuse:
            want[i] = std::max(
                1, static_cast<int>(
                       std::ceil(current * (1.0 + mean_need[i]) * grow)));
            break;
        default:
            want[i] = current;
            break;
        }
    }

    if (forecast) {
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = k.eta_hat[i] * k.rate_per_cu[i];
            if (!(denom > 0.0)) {
                throw SimError("non-positive capacity estimate in planner");
            }
            const int floor_cu = std::max(
                1, static_cast<int>(
                       std::ceil(forecast->peak_load * grow / denom)));
            want[i] = std::max(want[i], floor_cu);
        }
    }

    AdaptationPlan out;
    out.triggered_by = analysis;

    const bool all_ok =
        std::all_of(analysis.begin(), analysis.end(), [](Classification c) {
            return c == Classification::Ok;
        });
    if (all_ok && want == k.current_cu_max) {
        out.new_cu_max = k.current_cu_max;
        out.new_setpoints = k.goals.per_tier_setpoints;
        return out;
    }

    want = repair_budget(std::move(want), mean_need, k.current_cu_max,
                         k.goals.budget_cap);

    std::vector<double> weights(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = std::max(params.weight_floor, k.smoothed_response[i]);
    }
    out.new_cu_max = std::move(want);
    out.new_setpoints = resplit_setpoints(weights, k.goals.end_to_end_target,
                                          params.r_min);
    return out;
}

void execute(const AdaptationPlan& plan, plant::ChainState& chain,
             std::vector<ct::PIController>& controllers, KnowledgeModel& k) {
    const std::size_t n = tier_count(k);
    if (plan.new_cu_max.size() != n || plan.new_setpoints.size() != n ||
        chain.tiers.size() != n || controllers.size() != n) {
        throw SimError("plan does not cover every tier");
    }
    if (checked_sum(plan.new_cu_max) > k.goals.budget_cap) {
        throw SimError("plan exceeds budget_cap");
    }
    double setpoint_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (plan.new_cu_max[i] < 1) {
            throw SimError("plan drops cu_max below 1");
        }
        setpoint_sum += plan.new_setpoints[i];
    }
    if (std::abs(setpoint_sum - k.goals.end_to_end_target) > kSetpointTol) {
        throw SimError("plan set points do not sum to the target");
    }

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        auto& tier = chain.tiers[i];
        if (tier.cu_max != plan.new_cu_max[i]) {
            changed = true;
        }
        tier.cu_max = plan.new_cu_max[i];
        tier.cu_allocated = std::min(tier.cu_allocated,
                                     static_cast<double>(tier.cu_max));
        controllers[i] = ct::update_setpoint(controllers[i],
                                             plan.new_setpoints[i]);
    }
    k.current_cu_max = plan.new_cu_max;
    k.goals.per_tier_setpoints = plan.new_setpoints;
    if (changed) {
        k.reconfig_count += 1;
    }
}

void accrue_cost(KnowledgeModel& k, double dt, double r_end) {
    if (!(dt > 0.0)) {
        throw SimError("cost accrual needs a positive interval");
    }
    const double cu_total = checked_sum(k.current_cu_max);
    k.accrued_cost += k.goals.cu_price * cu_total * dt;
    if (r_end > k.goals.end_to_end_target) {
        k.accrued_cost += k.goals.penalty_rate * dt;
    }
}

} // namespace hiersim::mape
