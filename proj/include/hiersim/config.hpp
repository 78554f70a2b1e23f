#pragma once

#include <string>
#include <vector>

#include "hiersim/scenario.hpp"

namespace hiersim::cfg {

// Scenario files are strict JSON: every omitted field takes its documented
// default, every unknown key is rejected by name, and every invariant is
// checked before a config is returned.

/// Parse a scenario file, apply dotted key=value overrides (e.g.
/// "goal.sla_response_time=0.9"), and validate. Faults are ConfigError.
sim::ScenarioConfig parse_config(const std::string& text,
                                 const std::vector<std::string>& overrides = {});

/// Resolved config back to JSON text; parse_config(serialize_config(c))
/// reproduces c.
std::string serialize_config(const sim::ScenarioConfig& config);

} // namespace hiersim::cfg
