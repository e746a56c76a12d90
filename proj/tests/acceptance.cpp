// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [--known-failure N]... [criterion numbers...]; no numbers runs all of them.
// The exit status is non-zero when a criterion fails that is not listed as a
// known failure, or when a listed one passes.

#include "oracles.hpp"

#include "ura/amp.hpp"
#include "ura/analysis.hpp"
#include "ura/channel.hpp"
#include "ura/collision_model.hpp"
#include "ura/config.hpp"
#include "ura/harness.hpp"
#include "ura/mud.hpp"
#include "ura/pilots.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome collision_arithmetic() {
    const double c2 = ura::expected_collisions(1000, 65536.0, 2);
    const double loss = 2.0 * c2 / 1000.0;
    const bool ok = std::abs(c2 - 7.6218) <= 1e-3 && std::abs(loss - 0.0152) <= 1e-3;
    return {ok, fmt("E{C2} = %.6f (want 7.6218 +- 0.001), per-user loss = %.6f (want 0.0152 +- 0.001)", c2, loss)};
}

Outcome lmmse_oracle() {
    ura::Rng rng(2024);
    std::uniform_int_distribution<int> bits_d(3, 8);
    double worst_rel = 0.0, worst_cov = 0.0, worst_bound_gap = 0.0, worst_ortho_eq = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int bits = bits_d(rng);
        const std::int64_t n = std::int64_t{1} << bits;
        const std::int64_t np = std::uniform_int_distribution<std::int64_t>(2, std::min<std::int64_t>(64, n))(rng);
        const int k = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<std::int64_t>(np, 8)))(rng);
        const int m = std::uniform_int_distribution<int>(1, 3)(rng);
        const double n0 = std::exp(std::uniform_real_distribution<double>(-3.0, 2.0)(rng));
        const ura::PilotBook book(n, np, rng());
        auto support = ura::sample_without_replacement(n, k, rng);
        std::sort(support.begin(), support.end());
        std::vector<double> gamma(static_cast<std::size_t>(k));
        for (auto& g : gamma) g = std::exp(std::uniform_real_distribution<double>(-4.0, 1.0)(rng));
        const ura::CMatrix y = ura::complex_normal_matrix(rng, np, m, 1.0 + n0);

        const auto est = ura::lmmse_estimate(y, book, support, gamma, n0);
        const auto ref = oracle::joint_gaussian_mmse(y, oracle::dense_pilots(book), support, gamma, n0);
        worst_rel = std::max(worst_rel, oracle::rel_err(est.h_hat, ref.mean));
        const ura::CMatrix ce = ura::error_covariance(book, support, gamma, n0);
        worst_cov = std::max(worst_cov, oracle::rel_err(ce, ref.error_cov));
        for (int u = 0; u < k; ++u) {
            const double bound = ura::ortho_mse(static_cast<double>(np), gamma[static_cast<std::size_t>(u)], 1.0, n0);
            worst_bound_gap = std::min(worst_bound_gap, est.mse[static_cast<std::size_t>(u)] - bound);
        }
    }
    // orthogonal fixtures: the full DFT makes every support orthogonal
    for (int inst = 0; inst < 20; ++inst) {
        const std::int64_t n = std::int64_t{1} << (3 + inst % 4);
        const ura::PilotBook book(n, n, rng());
        auto support = ura::sample_without_replacement(n, 1 + inst % 5, rng);
        std::sort(support.begin(), support.end());
        std::vector<double> gamma(support.size());
        for (auto& g : gamma) g = std::exp(std::uniform_real_distribution<double>(-4.0, 1.0)(rng));
        const double n0 = 0.7;
        const auto ce = ura::error_covariance(book, support, gamma, n0);
        for (std::size_t u = 0; u < support.size(); ++u) {
            const double bound = ura::ortho_mse(static_cast<double>(n), gamma[u], 1.0, n0);
            worst_ortho_eq = std::max(worst_ortho_eq, std::abs(ce(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)).real() - bound) / bound);
        }
    }
    const bool ok = worst_rel <= 1e-8 && worst_cov <= 1e-8 && worst_bound_gap >= -1e-12 && worst_ortho_eq <= 1e-10;
    return {ok, fmt("max rel err estimate %.2e, error covariance %.2e (tol 1e-8); min diag(C_e) - bound %.2e; "
                    "orthogonal-fixture equality err %.2e",
                    worst_rel, worst_cov, worst_bound_gap, worst_ortho_eq)};
}

Outcome fast_operators() {
    ura::Rng rng(99);
    double worst = 0.0;
    for (int bits = 3; bits <= 6; ++bits) {
        const std::int64_t n = std::int64_t{1} << bits;
        for (int t = 0; t < 50; ++t) {
            const std::int64_t np = std::uniform_int_distribution<std::int64_t>(1, n)(rng);
            const int m = std::uniform_int_distribution<int>(1, 4)(rng);
            const ura::PilotBook book(n, np, rng());
            const ura::CMatrix a = oracle::dense_pilots(book);
            const ura::CMatrix x = ura::complex_normal_matrix(rng, n, m, 1.0);
            const ura::CMatrix z = ura::complex_normal_matrix(rng, np, m, 1.0);
            for (auto exec : {ura::Exec::serial, ura::Exec::parallel}) {
                worst = std::max(worst, oracle::rel_err(book.forward(x, exec), a * x));
                worst = std::max(worst, oracle::rel_err(book.adjoint(z, exec), a.adjoint() * z));
            }
        }
    }
    return {worst <= 1e-9, fmt("max relative error %.2e over N in {8,16,32,64}, 50 inputs each (tol 1e-9)", worst)};
}

Outcome amp_support() {
    const auto cfg = ura::preset_config("amp_desk");
    const auto book = cfg.pilot_book();
    const int trials = 200;
    std::vector<int> exact(trials, 0);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        ura::Rng rng(cfg.campaign_seed + static_cast<std::uint64_t>(t));
        const auto scene = ura::draw_scene(cfg.scene_params(), rng);
        const auto y = ura::emit_pilot_signal(scene, book, rng);
        std::vector<std::int64_t> truth(scene.pilot_indices.begin(), scene.pilot_indices.end());
        std::sort(truth.begin(), truth.end());
        truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
        auto amp = cfg.amp_config();
        amp.known_active = static_cast<int>(truth.size());
        exact[static_cast<std::size_t>(t)] = ura::run_mmv_amp(y, book, amp).support == truth;
    }
    const int hits = static_cast<int>(std::count(exact.begin(), exact.end(), 1));
    const double rate = static_cast<double>(hits) / trials;
    return {rate >= 0.95, fmt("exact support in %d/%d trials = %.3f (want >= 0.95)", hits, trials, rate)};
}

Outcome normal_approx() {
    double worst = 0.0;
    int points = 0;
    for (int i = 0; i < 100; ++i) {
        // SINR from -10 dB to 20 dB, several blocklengths and error targets
        const double sinr = ura::db_to_lin(-10.0 + 30.0 * i / 99.0);
        const int nd = 1024 << (i % 3);
        const double pe = 0.01 + 0.04 * (i % 5);
        const auto r = ura::normal_approx_rate(sinr, nd, pe);
        if (r.clamped || r.rate <= 0.0) continue;
        ++points;
        const double back = ura::required_sinr(r.rate, nd, pe);
        worst = std::max(worst, std::abs(back - sinr) / sinr);
    }
    double worst_half = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double sinr = ura::db_to_lin(-20.0 + 40.0 * i / 99.0);
        const double r = ura::normal_approx_rate(sinr, 2048, 0.5).rate;
        worst_half = std::max(worst_half, std::abs(r - 0.5 * std::log2(1.0 + sinr)));
    }
    const double unit = ura::required_sinr(0.5, 2048, 0.5);
    const bool ok = points == 100 && worst <= 1e-8 && worst_half <= 1e-15 && std::abs(unit - 1.0) <= 1e-8;
    return {ok, fmt("round-trip rel err %.2e over %d grid points (tol 1e-8); p_e=0.5 identity err %.2e; "
                    "required_sinr(0.5) at p_e=0.5 = %.12f",
                    worst, points, worst_half, unit)};
}

Outcome collision_model() {
    auto cfg = ura::preset_config("collide");
    cfg.sigma_est_db = {-15.0};
    cfg.trials = 400;
    const auto pts = ura::collision_curve(cfg);
    const auto& p = pts.front();
    const bool ok = std::abs(p.frac_both() - 0.75) <= 0.10 && p.frac_at_least_one() >= 0.95;
    return {ok, fmt("sigma_est = -15 dB, %d trials: both = %.3f (want 0.75 +- 0.10), at least one = %.3f (want >= 0.95)",
                    p.trials, p.frac_both(), p.frac_at_least_one())};
}

std::vector<ura::CampaignReport> campaigns;

Outcome end_to_end() {
    const auto cfg = ura::preset_config("desk");
    const auto pred = ura::predicted_ebn0(cfg, ura::MseModel::lmmse);
    const auto report = ura::run_campaign(cfg);
    campaigns.push_back(report);
    const double pe = report.error_rate();
    return {pred.feasible && pe < 0.05,
            fmt("predicted Eb/N0 %.3f dB, simulated at %.3f dB over %zu trials: p_md = %.4f, p_fa = %.4f, P_e = %.4f "
                "(want < 0.05)",
                pred.ebn0_db, ura::lin_to_db(report.config.ebn0()), report.trials.size(), report.p_md, report.p_fa, pe)};
}

Outcome metric_identities() {
    // a stressed fixed-size campaign so that misses occur
    auto fixed = ura::preset_config("desk");
    fixed.trials = 60;
    fixed.ebn0_margin_db = -1.5;
    fixed.fixed_list_size = true;
    const auto rf = ura::run_campaign(fixed);
    auto free = fixed;
    free.fixed_list_size = false;
    free.trials = 30;
    free.campaign_seed = 77;
    campaigns.push_back(ura::run_campaign(free));

    int checked = 0, broken = 0;
    for (const auto& c : campaigns)
        for (const auto& t : c.trials) {
            ++checked;
            broken += !t.list_identity_holds();
        }
    for (const auto& t : rf.trials) {
        ++checked;
        broken += !t.list_identity_holds() || t.list_size != fixed.active_users;
    }
    const bool equal = rf.p_fa == rf.p_md;
    return {broken == 0 && equal,
            fmt("list-size identity violated on %d of %d trials; fixed-size campaign p_md = %.6f, p_fa = %.6f (%s)", broken,
                checked, rf.p_md, rf.p_fa, equal ? "equal" : "DIFFER")};
}

Outcome curve_shape() {
    const auto cfg = ura::preset_config("paper_fig1");
    const auto pts = ura::analysis_curves(cfg);
    std::map<std::tuple<int, int, int>, double> e;
    for (const auto& p : pts) e[{static_cast<int>(p.model), p.antennas, p.active_users}] = p.result.ebn0_db;
    int bad_m = 0, bad_k = 0, bad_gap = 0, infeasible = 0;
    for (int model : {0, 1}) {
        for (int m : cfg.m_grid)
            for (std::size_t i = 1; i < cfg.ka_grid.size(); ++i)
                bad_k += e[{model, m, cfg.ka_grid[i]}] < e[{model, m, cfg.ka_grid[i - 1]}];
        for (int k : cfg.ka_grid)
            for (std::size_t j = 1; j < cfg.m_grid.size(); ++j)
                bad_m += e[{model, cfg.m_grid[j], k}] > e[{model, cfg.m_grid[j - 1], k}];
    }
    // The gap is compared where both models admit a finite power; beyond that
    // MRC is interference-limited (SINR < M / (K_a - 1)) and both are +inf.
    std::string gaps;
    int short_curves = 0;
    for (int m : cfg.m_grid) {
        double prev = -1.0;
        int finite = 0;
        for (int k : cfg.ka_grid) {
            const double lm = e[{1, m, k}], ort = e[{0, m, k}];
            if (!std::isfinite(lm) || !std::isfinite(ort)) {
                ++infeasible;
                bad_gap += std::isfinite(lm) != std::isfinite(ort) && std::isfinite(lm);
                continue;
            }
            ++finite;
            const double gap = lm - ort;
            bad_gap += gap <= prev;
            prev = gap;
        }
        short_curves += finite < 3;
    }
    for (int k : {100, 600, 1100}) gaps += fmt(" K_a=%d:%.3f", k, e[{1, 50, k}] - e[{0, 50, k}]);
    return {bad_m == 0 && bad_k == 0 && bad_gap == 0 && short_curves == 0,
            fmt("violations: in M %d, in K_a %d, gap monotonicity %d; interference-limited (+inf) points %d; "
                "lmmse - ortho gap at M=50 (dB):%s",
                bad_m, bad_k, bad_gap, infeasible, gaps.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"collision arithmetic", collision_arithmetic},
        {"lmmse oracle equivalence", lmmse_oracle},
        {"fast-operator equivalence", fast_operators},
        {"amp support recovery", amp_support},
        {"normal-approximation self-consistency", normal_approx},
        {"collision-model reproduction", collision_model},
        {"end-to-end vs analysis", end_to_end},
        {"metric identities", metric_identities},
        {"analysis curve shape", curve_shape},
    };
    std::set<int> only, known;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--known-failure" && i + 1 < argc)
            known.insert(std::stoi(argv[++i]));
        else
            only.insert(std::stoi(arg));
    }
    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool listed = known.count(id) > 0;
        unexpected += o.pass == listed;
        std::printf("criterion %d [%s] %s: %s (%.1f s)%s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs, listed ? (o.pass ? " [listed as known failure but passed]" : " [known failure]") : "");
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
