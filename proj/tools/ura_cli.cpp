#include "ura/config.hpp"
#include "ura/harness.hpp"
#include "ura/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_config) {
    c.config = default_config;
    sub->add_option("--config", c.config, "preset name or key-value config file")->capture_default_str();
    sub->add_option("--seed", c.seed, "campaign seed");
    sub->add_option("--trials", c.trials, "Monte Carlo trials");
    sub->add_option("--out", c.out, "output CSV path (default: stdout)");
}

ura::ExperimentConfig resolve(const Common& c) {
    auto cfg = ura::load_config(c.config);
    if (c.seed) cfg.campaign_seed = *c.seed;
    if (c.trials) cfg.trials = *c.trials;
    return cfg;
}

template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw ura::ConfigError("cannot open output file '" + path + "'");
    write(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ura: unsourced random access link simulator"};
    app.require_subcommand(1);

    Common analyze_opts, simulate_opts, collide_opts;
    auto* analyze = app.add_subcommand("analyze", "required Eb/N0 curves over the K_a x M grid");
    add_common(analyze, analyze_opts, "paper_fig1");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo campaign over the full receiver");
    add_common(simulate, simulate_opts, "desk");
    auto* collide = app.add_subcommand("collide", "two-user pilot-collision model sweep");
    add_common(collide, collide_opts, "collide");
    std::string sigma_range;
    std::optional<double> snr_db;
    std::optional<int> antennas;
    collide->add_option("--sigma-est-db", sigma_range, "estimation-error variance grid in dB, a:step:b or a,b,c");
    collide->add_option("--snr-db", snr_db, "per-antenna SNR in dB");
    collide->add_option("--antennas", antennas, "receive antennas");
    auto* selftest = app.add_subcommand("selftest", "built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*analyze) {
            const auto cfg = resolve(analyze_opts);
            const auto curves = ura::analysis_curves(cfg);
            emit(analyze_opts.out, [&](std::ostream& os) { ura::write_curve_csv(os, curves); });
        } else if (*simulate) {
            const auto cfg = resolve(simulate_opts);
            const auto report = ura::run_campaign(cfg);
            emit(simulate_opts.out, [&](std::ostream& os) { ura::write_campaign_csv(os, report); });
            std::cerr << ura::campaign_summary(report) << '\n';
        } else if (*collide) {
            auto cfg = resolve(collide_opts);
            if (!sigma_range.empty()) cfg.sigma_est_db = ura::parse_range(sigma_range);
            if (snr_db) cfg.collide_snr_db = *snr_db;
            if (antennas) cfg.collide_antennas = *antennas;
            cfg.validate();
            const auto points = ura::collision_curve(cfg);
            emit(collide_opts.out, [&](std::ostream& os) { ura::write_collision_csv(os, points); });
        } else if (*selftest) {
            return ura::run_selftest(std::cout) == 0 ? 0 : 2;
        }
    } catch (const ura::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
