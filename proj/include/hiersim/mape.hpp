#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "hiersim/ct.hpp"
#include "hiersim/ml.hpp"
#include "hiersim/plant.hpp"

namespace hiersim::mape {

// Supervisory MAPE-K loop over the per-tier controllers: watches need
// indices and response times, separates sustained infeasibility from
// transients the CT layer absorbs on its own, and reconfigures cu_max and
// set points within the owner's budget.

struct GoalSpec {
    double sla_response_time = 0.9; // seconds, end to end
    int budget_cap = 100;           // CU, total across tiers
    double penalty_rate = 1.0;      // cost/second while the SLA is violated
    double cu_price = 0.01;         // cost per CU-second provisioned
};

struct TechnicalGoals {
    double end_to_end_target = 0.9;        // seconds
    std::vector<double> per_tier_setpoints; // seconds, sums to the target
    int budget_cap = 100;
    double penalty_rate = 1.0;
    double cu_price = 0.01;
};

enum class Classification {
    Ok,
    TransientOverload,
    SustainedOverload,
    SustainedUnderuse,
};

struct AnalyzerParams {
    double theta_up = 0.1;     // need index above this counts as overload
    double theta_down = -0.5;  // need index below this counts as underuse
    double persistence = 30.0; // seconds a condition must hold, D
    double fraction = 0.8;     // share of samples over D that must agree
};

struct PlannerParams {
    double margin = 0.1;        // headroom multiplier on sizing and floors
    double resplit_smooth = 0.3; // weight of the newest response mean
    double r_min = 0.02;        // seconds, lower bound per set point
    double weight_floor = 1e-6; // seconds, floor on re-split weights
};

struct Sample {
    double t = 0.0;
    double value = 0.0;
};

struct KnowledgeModel {
    std::vector<std::deque<Sample>> need_history;     // one window per tier
    std::vector<std::deque<Sample>> response_history; // one window per tier
    std::deque<Sample> end_response_history;
    std::vector<int> current_cu_max;
    TechnicalGoals goals;
    double accrued_cost = 0.0;
    long long reconfig_count = 0;
    std::optional<ml::Forecast> latest_forecast;
    std::vector<double> eta_hat;           // per-tier efficiency estimates
    std::vector<double> rate_per_cu;       // per-tier plant constants
    std::vector<double> smoothed_response; // re-split weights, 0 = unset
    double window_keep = 300.0;            // seconds of history retained
};

struct AdaptationPlan {
    std::vector<int> new_cu_max;
    std::vector<double> new_setpoints;
    std::vector<Classification> triggered_by;
};

/// Split the owner's SLA into per-tier set points, target * w_i / sum(w),
/// with equal weights when none are given.
TechnicalGoals translate_goals(const GoalSpec& spec, int n_tiers,
                               const std::optional<std::vector<double>>& weights =
                                   std::nullopt);

/// Empty knowledge for an n-tier system in its initial configuration.
KnowledgeModel make_knowledge(const TechnicalGoals& goals,
                              const std::vector<int>& cu_max,
                              const std::vector<double>& rate_per_cu,
                              double window_keep);

/// Append one sample set at time t and trim every window to window_keep
/// seconds. Timestamps must be non-decreasing.
void monitor(KnowledgeModel& k, double t, const std::vector<double>& needs,
             const std::vector<plant::TierObservation>& observations,
             double r_end);

/// Classify each tier from its need window. Sustained states additionally
/// require the retained window to span at least the persistence horizon.
std::vector<Classification> analyze(const KnowledgeModel& k,
                                    const AnalyzerParams& params);

/// Fit a proposed allocation into the budget by unit cuts in ascending mean
/// need (ties to the lower tier index): first take back increases over the
/// running configuration, then, only if still over budget, cut below it,
/// never under 1 CU per tier.
std::vector<int> repair_budget(std::vector<int> want,
                               const std::vector<double>& mean_need,
                               const std::vector<int>& current,
                               int budget_cap);

/// target * w_i / sum(w) with every share held at least at r_min; shares
/// pinned at r_min drop out and the remainder is re-split proportionally,
/// so the result still sums to target.
std::vector<double> resplit_setpoints(const std::vector<double>& weights,
                                      double target, double r_min);

/// Build the next configuration: size sustained tiers from their mean need,
/// raise everything to the forecast floor when one is available, repair the
/// budget, and re-split set points by smoothed observed response times.
/// When every tier is Ok and no floor binds the plan is the current
/// configuration.
AdaptationPlan plan(const std::vector<Classification>& analysis,
                    KnowledgeModel& k,
                    const std::optional<ml::Forecast>& forecast,
                    const AnalyzerParams& analyzer,
                    const PlannerParams& params);

/// Apply a plan to the managed system: replace cu_max values (clamping any
/// over-allocated tier), push set points into the controllers without
/// touching their integrals, and count a reconfiguration iff any cu_max
/// changed.
void execute(const AdaptationPlan& plan, plant::ChainState& chain,
             std::vector<ct::PIController>& controllers, KnowledgeModel& k);

/// Charge cu_price for every provisioned CU-second plus the penalty rate
/// while the end-to-end response exceeds the target.
void accrue_cost(KnowledgeModel& k, double dt, double r_end);

} // namespace hiersim::mape
