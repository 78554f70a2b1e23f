#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hiersim/scenario.hpp"

namespace hiersim::io {

// Plot-ready serializations of runs. Column layout: t, r_in, then per tier i
// (1-based) q_i, r_time_i, cu_i, cu_max_i, need_i, eta_i, eta_hat_i, then
// r_end, cost, reconfigs. The JSONL lines carry the same field names.

std::string trace_csv(const std::vector<sim::TraceRecord>& trace, int n_tiers);

std::string trace_jsonl(const std::vector<sim::TraceRecord>& trace,
                        int n_tiers);

std::string summary_json(const sim::RunSummary& summary);

struct CompareReport {
    sim::RunSummary baseline_ct_only;
    sim::RunSummary mape;
    sim::RunSummary mape_ml;
};

/// Per-variant summaries plus sla/cost deltas of each enabled variant
/// against the baseline.
std::string compare_json(const CompareReport& report);

/// Write-then-rename so a crash never leaves a truncated file that parses.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

} // namespace hiersim::io
