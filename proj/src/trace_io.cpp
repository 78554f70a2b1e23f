#include "hiersim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "json.hpp"

#include "hiersim/errors.hpp"

namespace hiersim::io {

namespace {

using ordered_json = nlohmann::ordered_json;

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

void append_number(std::string& out, long long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

std::string column(const char* stem, int tier) {
    return std::string(stem) + "_" + std::to_string(tier);
}

void check_width(const sim::TraceRecord& rec, std::size_t n) {
    if (rec.queue.size() != n || rec.response_time.size() != n ||
        rec.cu_allocated.size() != n || rec.cu_max.size() != n ||
        rec.need.size() != n || rec.efficiency.size() != n ||
        rec.eta_hat.size() != n) {
        throw SimError("trace record does not cover every tier");
    }
}

ordered_json summary_to_json(const sim::RunSummary& s) {
    ordered_json j;
    j["sla_compliance_fraction"] = s.sla_compliance_fraction;
    j["total_cost"] = s.total_cost;
    j["reconfig_count"] = s.reconfig_count;
    j["mean_need"] = s.mean_need;
    j["max_need"] = s.max_need;
    if (s.forecaster_mae) {
        j["forecaster_mae"] = *s.forecaster_mae;
    }
    if (s.naive_mae) {
        j["naive_mae"] = *s.naive_mae;
    }
    j["max_mass_drift"] = s.max_mass_drift;
    return j;
}

} // namespace

std::string trace_csv(const std::vector<sim::TraceRecord>& trace,
                      int n_tiers) {
    const auto n = static_cast<std::size_t>(n_tiers);
    std::string out = "t,r_in";
    for (int i = 1; i <= n_tiers; ++i) {
        for (const char* stem :
             {"q", "r_time", "cu", "cu_max", "need", "eta", "eta_hat"}) {
            out += "," + column(stem, i);
        }
    }
    out += ",r_end,cost,reconfigs\n";

    for (const auto& rec : trace) {
        check_width(rec, n);
        append_number(out, rec.t);
        out += ',';
        append_number(out, rec.r_in);
        for (std::size_t i = 0; i < n; ++i) {
            out += ',';
            append_number(out, rec.queue[i]);
            out += ',';
            append_number(out, rec.response_time[i]);
            out += ',';
            append_number(out, rec.cu_allocated[i]);
            out += ',';
            append_number(out, static_cast<long long>(rec.cu_max[i]));
            out += ',';
            append_number(out, rec.need[i]);
            out += ',';
            append_number(out, rec.efficiency[i]);
            out += ',';
            append_number(out, rec.eta_hat[i]);
        }
        out += ',';
        append_number(out, rec.r_end);
        out += ',';
        append_number(out, rec.accrued_cost);
        out += ',';
        append_number(out, rec.reconfig_count);
        out += '\n';
    }
    return out;
}

std::string trace_jsonl(const std::vector<sim::TraceRecord>& trace,
                        int n_tiers) {
    const auto n = static_cast<std::size_t>(n_tiers);
    std::string out;
    for (const auto& rec : trace) {
        check_width(rec, n);
        ordered_json j;
        j["t"] = rec.t;
        j["r_in"] = rec.r_in;
        for (std::size_t i = 0; i < n; ++i) {
            const int tier = static_cast<int>(i) + 1;
            j[column("q", tier)] = rec.queue[i];
            j[column("r_time", tier)] = rec.response_time[i];
            j[column("cu", tier)] = rec.cu_allocated[i];
            j[column("cu_max", tier)] = rec.cu_max[i];
            j[column("need", tier)] = rec.need[i];
            j[column("eta", tier)] = rec.efficiency[i];
            j[column("eta_hat", tier)] = rec.eta_hat[i];
        }
        j["r_end"] = rec.r_end;
        j["cost"] = rec.accrued_cost;
        j["reconfigs"] = rec.reconfig_count;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string summary_json(const sim::RunSummary& summary) {
    return summary_to_json(summary).dump(2) + "\n";
}

std::string compare_json(const CompareReport& report) {
    ordered_json j;
    j["variants"]["baseline_ct_only"] = summary_to_json(report.baseline_ct_only);
    j["variants"]["mape"] = summary_to_json(report.mape);
    j["variants"]["mape_ml"] = summary_to_json(report.mape_ml);
    const auto deltas = [&](const sim::RunSummary& s) {
        ordered_json d;
        d["sla"] = s.sla_compliance_fraction -
                   report.baseline_ct_only.sla_compliance_fraction;
        d["cost"] = s.total_cost - report.baseline_ct_only.total_cost;
        return d;
    };
    j["deltas"]["mape"] = deltas(report.mape);
    j["deltas"]["mape_ml"] = deltas(report.mape_ml);
    return j.dump(2) + "\n";
}

void atomic_write(const std::filesystem::path& path,
                  const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw SimError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw SimError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw SimError("cannot rename " + tmp.string() + " to " +
                       path.string() + ": " + ec.message());
    }
}

} // namespace hiersim::io
