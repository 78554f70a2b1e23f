#include "hiersim/config.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>
#include <string_view>

#include "json.hpp"

#include "hiersim/errors.hpp"

namespace hiersim::cfg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
    throw ConfigError(message);
}

std::string joined(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path + " must be a JSON object");
    }
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail("unknown key \"" + joined(path, item.key()) + "\"");
        }
    }
}

double get_double(const json& j, const std::string& path,
                  const std::string& key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        fail(joined(path, key) + " must be a number");
    }
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            int fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
        fail(joined(path, key) + " must be an integer");
    }
    return v.get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key,
              bool fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_boolean()) {
        fail(joined(path, key) + " must be a boolean");
    }
    return v.get<bool>();
}

double require_double(const json& j, const std::string& path,
                      const std::string& key) {
    if (!j.contains(key)) {
        fail(joined(path, key) + " is required");
    }
    return get_double(j, path, key, 0.0);
}

dist::DisturbanceSpec parse_disturbance(const json& j,
                                        const std::string& path) {
    check_object(j, path);
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        fail(path + ".kind must name a disturbance kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        check_keys(j, path, {"kind", "value"});
        return dist::Constant{require_double(j, path, "value")};
    }
    if (kind == "step") {
        check_keys(j, path, {"kind", "t0", "before", "after"});
        return dist::Step{require_double(j, path, "t0"),
                          require_double(j, path, "before"),
                          require_double(j, path, "after")};
    }
    if (kind == "pulse") {
        check_keys(j, path, {"kind", "t0", "width", "base", "level"});
        return dist::Pulse{require_double(j, path, "t0"),
                           require_double(j, path, "width"),
                           require_double(j, path, "base"),
                           require_double(j, path, "level")};
    }
    if (kind == "sinusoid") {
        check_keys(j, path, {"kind", "base", "amplitude", "period",
                             "noise_sigma"});
        return dist::Sinusoid{require_double(j, path, "base"),
                              require_double(j, path, "amplitude"),
                              require_double(j, path, "period"),
                              get_double(j, path, "noise_sigma", 0.0)};
    }
    if (kind == "piecewise_random") {
        check_keys(j, path, {"kind", "mean", "spread", "dwell"});
        return dist::PiecewiseRandom{require_double(j, path, "mean"),
                                     require_double(j, path, "spread"),
                                     require_double(j, path, "dwell")};
    }
    fail(path + ".kind \"" + kind + "\" is not a disturbance kind");
}

json disturbance_to_json(const dist::DisturbanceSpec& spec) {
    struct Visitor {
        json operator()(const dist::Constant& s) const {
            return {{"kind", "constant"}, {"value", s.value}};
        }
        json operator()(const dist::Step& s) const {
            return {{"kind", "step"},
                    {"t0", s.t0},
                    {"before", s.before},
                    {"after", s.after}};
        }
        json operator()(const dist::Pulse& s) const {
            return {{"kind", "pulse"},
                    {"t0", s.t0},
                    {"width", s.width},
                    {"base", s.base},
                    {"level", s.level}};
        }
        json operator()(const dist::Sinusoid& s) const {
            return {{"kind", "sinusoid"},
                    {"base", s.base},
                    {"amplitude", s.amplitude},
                    {"period", s.period},
                    {"noise_sigma", s.noise_sigma}};
        }
        json operator()(const dist::PiecewiseRandom& s) const {
            return {{"kind", "piecewise_random"},
                    {"mean", s.mean},
                    {"spread", s.spread},
                    {"dwell", s.dwell}};
        }
    };
    return std::visit(Visitor{}, spec);
}

/// Parse the value side of an override: valid JSON is taken as-is, anything
/// else becomes a string (so load.kind=step needs no quoting).
json override_value(const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        return json(text);
    }
    return parsed;
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        fail("override \"" + assignment + "\" is not of the form key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    std::vector<std::string> segments;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        segments.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    for (const auto& seg : segments) {
        if (seg.empty()) {
            fail("override path \"" + path + "\" has an empty segment");
        }
    }

    json* node = &root;
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        const std::string& seg = segments[i];
        const bool numeric =
            seg.size() <= 9 &&
            std::all_of(seg.begin(), seg.end(),
                        [](unsigned char c) { return std::isdigit(c); });
        if (numeric && node->is_array()) {
            const std::size_t idx = std::stoul(seg);
            if (idx >= node->size()) {
                fail("override index " + seg + " is out of range in \"" +
                     path + "\"");
            }
            node = &(*node)[idx];
        } else {
            if (!node->is_object()) {
                fail("override path \"" + path +
                     "\" descends into a non-object");
            }
            node = &(*node)[seg];
            if (node->is_null()) {
                *node = json::object();
            }
        }
    }

    const std::string& leaf = segments.back();
    const bool numeric =
        leaf.size() <= 9 &&
        std::all_of(leaf.begin(), leaf.end(),
                    [](unsigned char c) { return std::isdigit(c); });
    if (numeric && node->is_array()) {
        const std::size_t idx = std::stoul(leaf);
        if (idx >= node->size()) {
            fail("override index " + leaf + " is out of range in \"" + path +
                 "\"");
        }
        (*node)[idx] = override_value(value);
    } else if (node->is_object()) {
        (*node)[leaf] = override_value(value);
    } else {
        fail("override path \"" + path + "\" descends into a non-object");
    }
}

sim::TierConfig parse_tier(const json& j, const std::string& path,
                           const sim::TierConfig& defaults) {
    check_object(j, path);
    check_keys(j, path, {"cu_max", "rate_per_cu", "kp", "ki", "tracking_gain"});
    sim::TierConfig tier;
    tier.cu_max = get_int(j, path, "cu_max", defaults.cu_max);
    tier.rate_per_cu = get_double(j, path, "rate_per_cu", defaults.rate_per_cu);
    tier.kp = get_double(j, path, "kp", defaults.kp);
    tier.ki = get_double(j, path, "ki", defaults.ki);
    tier.tracking_gain =
        get_double(j, path, "tracking_gain", defaults.tracking_gain);
    return tier;
}

} // namespace

sim::ScenarioConfig parse_config(const std::string& text,
                                 const std::vector<std::string>& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(e.what());
    }
    if (!root.is_object()) {
        fail("scenario file must hold a JSON object");
    }
    for (const auto& assignment : overrides) {
        apply_override(root, assignment);
    }

    check_keys(root, "",
               {"n_tiers", "duration", "h", "T_ct", "T_mape", "seed",
                "mape_enabled", "ml_enabled", "goal", "tiers", "analyzer",
                "planner", "window_keep", "ml", "load", "efficiency"});

    sim::ScenarioConfig config;
    config.duration = get_double(root, "", "duration", config.duration);
    config.h = get_double(root, "", "h", config.h);
    config.t_ct = get_double(root, "", "T_ct", config.t_ct);
    config.t_mape = get_double(root, "", "T_mape", config.t_mape);
    config.mape_enabled =
        get_bool(root, "", "mape_enabled", config.mape_enabled);
    config.ml_enabled = get_bool(root, "", "ml_enabled", config.ml_enabled);

    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_integer()) {
            fail("seed must be a non-negative integer");
        }
        if (!v.is_number_unsigned() && v.get<long long>() < 0) {
            fail("seed must be a non-negative integer");
        }
        config.seed = v.get<std::uint64_t>();
    }

    // Tier count: explicit n_tiers wins; otherwise the tiers array decides.
    if (root.contains("n_tiers")) {
        config.n_tiers = get_int(root, "", "n_tiers", config.n_tiers);
    } else if (root.contains("tiers") && root.at("tiers").is_array()) {
        config.n_tiers = static_cast<int>(root.at("tiers").size());
    }
    if (config.n_tiers < 1) {
        fail("n_tiers must be at least 1");
    }
    const auto n = static_cast<std::size_t>(config.n_tiers);

    // tracking_gain's default tracks T_ct, so resolve it before the tiers.
    sim::TierConfig tier_defaults;
    if (config.t_ct > 0.0) {
        tier_defaults.tracking_gain = 1.0 / (10.0 * config.t_ct);
    }

    config.tiers.assign(n, tier_defaults);
    if (root.contains("tiers")) {
        const json& tiers = root.at("tiers");
        if (!tiers.is_array()) {
            fail("tiers must be an array");
        }
        if (tiers.size() != n) {
            fail("tiers lists " + std::to_string(tiers.size()) +
                 " entries for n_tiers=" + std::to_string(config.n_tiers));
        }
        for (std::size_t i = 0; i < n; ++i) {
            config.tiers[i] = parse_tier(
                tiers[i], "tiers." + std::to_string(i), tier_defaults);
        }
    }

    if (root.contains("goal")) {
        const json& goal = root.at("goal");
        check_object(goal, "goal");
        check_keys(goal, "goal",
                   {"sla_response_time", "budget_cap", "penalty_rate",
                    "cu_price", "weights"});
        config.goal.sla_response_time = get_double(
            goal, "goal", "sla_response_time", config.goal.sla_response_time);
        config.goal.budget_cap =
            get_int(goal, "goal", "budget_cap", config.goal.budget_cap);
        config.goal.penalty_rate =
            get_double(goal, "goal", "penalty_rate", config.goal.penalty_rate);
        config.goal.cu_price =
            get_double(goal, "goal", "cu_price", config.goal.cu_price);
        if (goal.contains("weights")) {
            const json& w = goal.at("weights");
            if (!w.is_array()) {
                fail("goal.weights must be an array of numbers");
            }
            std::vector<double> weights;
            for (const auto& v : w) {
                if (!v.is_number()) {
                    fail("goal.weights must be an array of numbers");
                }
                weights.push_back(v.get<double>());
            }
            config.goal_weights = std::move(weights);
        }
    }

    if (root.contains("analyzer")) {
        const json& a = root.at("analyzer");
        check_object(a, "analyzer");
        check_keys(a, "analyzer",
                   {"theta_up", "theta_down", "persistence", "fraction"});
        config.analyzer.theta_up =
            get_double(a, "analyzer", "theta_up", config.analyzer.theta_up);
        config.analyzer.theta_down = get_double(a, "analyzer", "theta_down",
                                                config.analyzer.theta_down);
        config.analyzer.persistence = get_double(
            a, "analyzer", "persistence", config.analyzer.persistence);
        config.analyzer.fraction =
            get_double(a, "analyzer", "fraction", config.analyzer.fraction);
    }

    if (root.contains("planner")) {
        const json& p = root.at("planner");
        check_object(p, "planner");
        check_keys(p, "planner", {"margin", "alpha_w", "r_min", "weight_floor"});
        config.planner.margin =
            get_double(p, "planner", "margin", config.planner.margin);
        config.planner.resplit_smooth =
            get_double(p, "planner", "alpha_w", config.planner.resplit_smooth);
        config.planner.r_min =
            get_double(p, "planner", "r_min", config.planner.r_min);
        config.planner.weight_floor = get_double(
            p, "planner", "weight_floor", config.planner.weight_floor);
    }

    config.window_keep =
        get_double(root, "", "window_keep", 5.0 * config.t_mape);

    config.ml.horizon = config.t_mape;
    if (root.contains("ml")) {
        const json& m = root.at("ml");
        check_object(m, "ml");
        check_keys(m, "ml", {"period", "bins", "alpha_r", "alpha_e", "horizon"});
        config.ml.period = get_double(m, "ml", "period", config.ml.period);
        config.ml.bins = get_int(m, "ml", "bins", config.ml.bins);
        config.ml.alpha_r = get_double(m, "ml", "alpha_r", config.ml.alpha_r);
        config.ml.alpha_e = get_double(m, "ml", "alpha_e", config.ml.alpha_e);
        config.ml.horizon = get_double(m, "ml", "horizon", config.ml.horizon);
    }

    if (root.contains("load")) {
        config.load = parse_disturbance(root.at("load"), "load");
    }

    config.efficiency.assign(n, dist::Constant{1.0});
    if (root.contains("efficiency")) {
        const json& eff = root.at("efficiency");
        if (!eff.is_array()) {
            fail("efficiency must be an array of disturbance specs");
        }
        if (eff.size() != n) {
            fail("efficiency lists " + std::to_string(eff.size()) +
                 " specs for n_tiers=" + std::to_string(config.n_tiers));
        }
        for (std::size_t i = 0; i < n; ++i) {
            config.efficiency[i] = parse_disturbance(
                eff[i], "efficiency." + std::to_string(i));
        }
    }

    sim::validate_config(config);
    return config;
}

std::string serialize_config(const sim::ScenarioConfig& config) {
    json root;
    root["n_tiers"] = config.n_tiers;
    root["duration"] = config.duration;
    root["h"] = config.h;
    root["T_ct"] = config.t_ct;
    root["T_mape"] = config.t_mape;
    root["seed"] = config.seed;
    root["mape_enabled"] = config.mape_enabled;
    root["ml_enabled"] = config.ml_enabled;

    json goal;
    goal["sla_response_time"] = config.goal.sla_response_time;
    goal["budget_cap"] = config.goal.budget_cap;
    goal["penalty_rate"] = config.goal.penalty_rate;
    goal["cu_price"] = config.goal.cu_price;
    if (config.goal_weights) {
        goal["weights"] = *config.goal_weights;
    }
    root["goal"] = std::move(goal);

    json tiers = json::array();
    for (const auto& tier : config.tiers) {
        tiers.push_back({{"cu_max", tier.cu_max},
                         {"rate_per_cu", tier.rate_per_cu},
                         {"kp", tier.kp},
                         {"ki", tier.ki},
                         {"tracking_gain", tier.tracking_gain}});
    }
    root["tiers"] = std::move(tiers);

    root["analyzer"] = {{"theta_up", config.analyzer.theta_up},
                        {"theta_down", config.analyzer.theta_down},
                        {"persistence", config.analyzer.persistence},
                        {"fraction", config.analyzer.fraction}};
    root["planner"] = {{"margin", config.planner.margin},
                       {"alpha_w", config.planner.resplit_smooth},
                       {"r_min", config.planner.r_min},
                       {"weight_floor", config.planner.weight_floor}};
    root["window_keep"] = config.window_keep;
    root["ml"] = {{"period", config.ml.period},
                  {"bins", config.ml.bins},
                  {"alpha_r", config.ml.alpha_r},
                  {"alpha_e", config.ml.alpha_e},
                  {"horizon", config.ml.horizon}};
    root["load"] = disturbance_to_json(config.load);
    json eff = json::array();
    for (const auto& spec : config.efficiency) {
        eff.push_back(disturbance_to_json(spec));
    }
    root["efficiency"] = std::move(eff);

    return root.dump(2) + "\n";
}

} // namespace hiersim::cfg
