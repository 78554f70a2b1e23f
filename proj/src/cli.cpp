#include "hiersim/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hiersim/config.hpp"
#include "hiersim/errors.hpp"
#include "hiersim/scenario.hpp"
#include "hiersim/trace_io.hpp"

namespace hiersim::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read scenario file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// HIERSIM_SEED takes precedence over both the file and --set overrides.
std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("HIERSIM_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    const char* end = raw + std::strlen(raw);
    const auto res = std::from_chars(raw, end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError("HIERSIM_SEED must be a non-negative integer");
    }
    return value;
}

sim::ScenarioConfig load_scenario(const std::string& path,
                                  const std::vector<std::string>& sets) {
    sim::ScenarioConfig config = cfg::parse_config(read_file(path), sets);
    if (const auto seed = env_seed()) {
        config.seed = *seed;
    }
    return config;
}

void write_run(const std::filesystem::path& dir, const sim::RunResult& result,
               int n_tiers) {
    io::atomic_write(dir / "trace.csv", io::trace_csv(result.trace, n_tiers));
    io::atomic_write(dir / "trace.jsonl",
                     io::trace_jsonl(result.trace, n_tiers));
    io::atomic_write(dir / "summary.json", io::summary_json(result.summary));
}

int ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "config error: cannot create output directory "
                  << dir.string() << ": " << ec.message() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

} // namespace

int run_main(int argc, const char* const* argv) {
    CLI::App app{"deterministic multirate simulation of a multi-tier service "
                 "under layered adaptation"};
    app.name("hiersim");
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir;
    std::vector<std::string> sets;

    CLI::App* validate =
        app.add_subcommand("validate", "parse and check a scenario file");
    validate->add_option("--scenario", scenario, "scenario JSON file")
        ->required();

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--scenario", scenario, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--set", sets, "override as dotted key=value");

    CLI::App* compare = app.add_subcommand(
        "compare", "run the adaptation on/off comparison on one scenario");
    compare->add_option("--scenario", scenario, "scenario JSON file")
        ->required();
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_option("--set", sets, "override as dotted key=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate->parsed()) {
            load_scenario(scenario, {});
            std::cout << "ok\n";
            return kExitOk;
        }

        const sim::ScenarioConfig config = load_scenario(scenario, sets);

        if (run->parsed()) {
            const sim::RunResult result = sim::run_scenario(config);
            if (const int rc = ensure_dir(out_dir); rc != kExitOk) {
                return rc;
            }
            try {
                write_run(out_dir, result, config.n_tiers);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kExitConfig;
            }
            std::cout << "wrote " << out_dir << "\n";
            return kExitOk;
        }

        // compare: three runs off one config and seed, differing only in
        // the enable flags.
        struct Variant {
            const char* name;
            bool mape;
            bool ml;
        };
        constexpr Variant kVariants[] = {{"baseline_ct_only", false, false},
                                         {"mape", true, false},
                                         {"mape_ml", true, true}};
        io::CompareReport report;
        sim::RunSummary* slots[] = {&report.baseline_ct_only, &report.mape,
                                    &report.mape_ml};
        if (const int rc = ensure_dir(out_dir); rc != kExitOk) {
            return rc;
        }
        for (std::size_t i = 0; i < 3; ++i) {
            sim::ScenarioConfig variant = config;
            variant.mape_enabled = kVariants[i].mape;
            variant.ml_enabled = kVariants[i].ml;
            const sim::RunResult result = sim::run_scenario(variant);
            *slots[i] = result.summary;
            const std::filesystem::path dir =
                std::filesystem::path(out_dir) / kVariants[i].name;
            if (const int rc = ensure_dir(dir); rc != kExitOk) {
                return rc;
            }
            try {
                write_run(dir, result, variant.n_tiers);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
        try {
            io::atomic_write(std::filesystem::path(out_dir) / "compare.json",
                             io::compare_json(report));
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
        std::cout << "wrote " << out_dir << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace hiersim::cli
