#include "ura/harness.hpp"

#include "ura/config.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace ura {

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

double ExperimentConfig::power_pilot() const {
    if (ebn0_db) return db_to_lin(*ebn0_db) * message_bits * n0 / frame_length();
    return p_pilot;
}

double ExperimentConfig::power_data() const {
    if (ebn0_db) return db_to_lin(*ebn0_db) * message_bits * n0 / frame_length();
    return p_data;
}

double ExperimentConfig::ebn0() const {
    return ebn0_linear(pilot_length, data_length, message_bits, power_pilot(), power_data(), n0);
}

void ExperimentConfig::validate() const {
    if (pilot_bits < 1 || pilot_bits > 30) throw ConfigError("J must be in [1, 30]");
    if (pilot_length < 1 || pilot_length > pool_size()) throw ConfigError("n_p must be in [1, 2^J]");
    if (message_bits <= pilot_bits) throw ConfigError("B must exceed J");
    if (data_length < 1 || !is_power_of_two(block_length())) throw ConfigError("2 n_d must be a power of two");
    if (payload_bits() + crc_bits >= block_length()) throw ConfigError("B - J + crc bits must be below 2 n_d");
    if (antennas < 1) throw ConfigError("M must be >= 1");
    if (active_users < 1 || active_users >= pool_size()) throw ConfigError("K_a must be in [1, 2^J)");
    if (!(n0 > 0.0)) throw ConfigError("N0 must be positive");
    if (power_pilot() < 0.0 || power_data() < 0.0) throw ConfigError("powers must be non-negative");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (list_size < 1) throw ConfigError("list size must be >= 1");
    if (!(error_prob > 0.0 && error_prob < 1.0)) throw ConfigError("error_prob must be in (0, 1)");
    if (pilot_draws < 1) throw ConfigError("pilot_draws must be >= 1");
    if (collide_antennas < 1) throw ConfigError("collide_antennas must be >= 1");
    crc_polynomial(crc_bits);
    for (int m : m_grid)
        if (m < 1) throw ConfigError("m_grid entries must be >= 1");
    amp_config().validate();
}

SceneParams ExperimentConfig::scene_params() const {
    SceneParams p;
    p.active_users = active_users;
    p.message_bits = message_bits;
    p.pilot_bits = pilot_bits;
    p.antennas = antennas;
    p.p_pilot = power_pilot();
    p.p_data = power_data();
    p.n0 = n0;
    return p;
}

AmpConfig ExperimentConfig::amp_config() const {
    AmpConfig a;
    a.max_iters = amp_max_iters;
    a.damping = amp_damping;
    a.tolerance = amp_tolerance;
    a.sparsity = static_cast<double>(active_users) / static_cast<double>(pool_size());
    a.prior_power = std::max(power_pilot(), std::numeric_limits<double>::min());
    if (support_rule == SupportRule::known_active)
        a.known_active = active_users;
    else
        a.threshold = threshold;
    a.exec = Exec::serial;
    return a;
}

double ExperimentConfig::design_snr() const {
    if (design_snr_db) return db_to_lin(*design_snr_db);
    return required_sinr(static_cast<double>(payload_bits()) / block_length(), data_length, error_prob);
}

PolarCodeSpec ExperimentConfig::polar_code() const {
    return construct_polar_snr(block_length(), payload_bits(), crc_bits, design_snr(), list_size);
}

PilotBook ExperimentConfig::pilot_book() const {
    return PilotBook(pool_size(), pilot_length, pilot_seed.value_or(campaign_seed));
}

// ---------------------------------------------------------------------------
// trials

void ListAssembly::add(std::int64_t pilot, int pilot_bits, const Bits& payload) {
    Bits msg = uint_to_bits(static_cast<std::uint64_t>(pilot), static_cast<std::size_t>(pilot_bits));
    msg.insert(msg.end(), payload.begin(), payload.end());
    list.push_back(std::move(msg));
}

namespace {

struct Candidate {
    double metric;
    std::int64_t pilot;
    const Bits* payload;
};

}  // namespace

TrialReport run_trial_on_scene(const ExperimentConfig& cfg, const PilotBook& book, const PolarCodeSpec& code,
                               const Scene& scene, Rng& rng, int trial_index) {
    TrialReport rep;
    rep.trial = trial_index;
    rep.active_users = scene.active_users();
    rep.collisions = static_cast<int>(count_collisions(scene.pilot_indices, 2));

    std::vector<std::int64_t> support;
    std::vector<DecodeOutput> decoded;
    try {
        const CMatrix y_pilot = emit_pilot_signal(scene, book, rng);
        CMatrix symbols(scene.active_users(), cfg.data_length);
        for (int k = 0; k < scene.active_users(); ++k)
            symbols.row(k) = qpsk_modulate(polar_encode(code, scene.payload(k))).transpose();
        const CMatrix y_data = emit_data_signal(scene, symbols, rng);

        const AmpResult amp = run_mmv_amp(y_pilot, book, cfg.amp_config());
        rep.amp_iterations = amp.iterations;
        rep.amp_converged = amp.converged;
        std::vector<std::int64_t> truth(scene.pilot_indices.begin(), scene.pilot_indices.end());
        std::sort(truth.begin(), truth.end());
        truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
        rep.support_f1 = support_f1(amp.support, truth);
        for (auto t : truth) rep.missed_pilots += !std::binary_search(amp.support.begin(), amp.support.end(), t);

        std::vector<double> gamma;
        for (auto k : amp.support) {
            const double g = cfg.gamma_source == GammaSource::prior ? cfg.power_pilot()
                                                                    : amp.gamma_hat[static_cast<std::size_t>(k)];
            if (g > 0.0) {
                support.push_back(k);
                gamma.push_back(g);
            }
        }
        const auto est = lmmse_estimate(y_pilot, book, support, gamma, cfg.n0);
        const auto soft = mrc_detect(y_data, est, {cfg.power_pilot(), cfg.power_data(), cfg.n0, cfg.llr_noise}, Exec::serial);
        SclOptions opts;
        opts.check_node = cfg.check_node;
        decoded.resize(support.size());
        for (std::size_t r = 0; r < support.size(); ++r) {
            if (!soft.valid[r]) continue;
            const RVector llr = soft.llr.row(static_cast<Eigen::Index>(r)).transpose();
            decoded[r] = scl_decode(code, std::span<const double>(llr.data(), static_cast<std::size_t>(llr.size())), opts);
            rep.decoded_rows += !decoded[r].candidates.empty();
        }
    } catch (const std::exception& e) {
        rep.failure = e.what();
    }

    // assemble the output list
    std::vector<Candidate> cands;
    for (std::size_t r = 0; r < decoded.size(); ++r)
        for (std::size_t c = 0; c < decoded[r].candidates.size(); ++c)
            cands.push_back({decoded[r].metrics[c], support[r], &decoded[r].candidates[c]});

    ListAssembly list;
    if (cfg.fixed_list_size) {
        std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.metric < b.metric; });
    }
    for (const auto& c : cands) list.add(c.pilot, cfg.pilot_bits, *c.payload);
    if (cfg.dedup) {
        // keep first occurrence (best metric under fixed_list_size)
        std::set<Bits> seen;
        std::vector<Bits> unique;
        for (auto& m : list.list)
            if (seen.insert(m).second) unique.push_back(std::move(m));
        list.list = std::move(unique);
    }
    if (cfg.fixed_list_size) {
        const auto target = static_cast<std::size_t>(scene.active_users());
        if (list.list.size() > target) list.list.resize(target);
        std::set<Bits> present(list.list.begin(), list.list.end());
        // pad with the best CRC-failing paths, then with fresh random messages
        std::vector<Candidate> fallback;
        for (std::size_t r = 0; r < decoded.size(); ++r)
            for (std::size_t c = 0; c < decoded[r].rejected.size(); ++c)
                fallback.push_back({decoded[r].rejected_metrics[c], support[r], &decoded[r].rejected[c]});
        std::stable_sort(fallback.begin(), fallback.end(), [](const Candidate& a, const Candidate& b) { return a.metric < b.metric; });
        for (const auto& c : fallback) {
            if (list.list.size() >= target) break;
            ListAssembly one;
            one.add(c.pilot, cfg.pilot_bits, *c.payload);
            if (present.insert(one.list[0]).second) {
                list.list.push_back(one.list[0]);
                ++rep.padded;
            }
        }
        std::bernoulli_distribution coin(0.5);
        while (list.list.size() < target) {
            Bits m(static_cast<std::size_t>(cfg.message_bits));
            for (auto& b : m) b = coin(rng) ? 1 : 0;
            if (present.insert(m).second) {
                list.list.push_back(std::move(m));
                ++rep.padded;
            }
        }
    }

    std::sort(list.list.begin(), list.list.end());
    const std::set<Bits> sent(scene.messages.begin(), scene.messages.end());
    const std::set<Bits> listed(list.list.begin(), list.list.end());
    for (const auto& m : scene.messages) rep.n_md += !listed.count(m);
    for (const auto& m : list.list) rep.n_fa += !sent.count(m);
    rep.list_size = static_cast<int>(list.list.size());
    rep.output_list = std::move(list.list);
    return rep;
}

TrialReport run_trial(const ExperimentConfig& cfg, const PilotBook& book, const PolarCodeSpec& code, int trial_index) {
    Rng rng(cfg.campaign_seed + static_cast<std::uint64_t>(trial_index));
    const Scene scene = draw_scene(cfg.scene_params(), rng);
    return run_trial_on_scene(cfg, book, code, scene, rng, trial_index);
}

Interval wilson_interval(double successes, double n, double z) {
    if (n <= 0.0) return {0.0, 1.0};
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EbN0Result predicted_ebn0(const ExperimentConfig& cfg, MseModel model) {
    EbN0Query q;
    q.active_users = cfg.active_users;
    q.antennas = cfg.antennas;
    q.pilot_length = cfg.pilot_length;
    q.data_length = cfg.data_length;
    q.message_bits = cfg.message_bits;
    q.pilot_bits = cfg.pilot_bits;
    q.error_prob = cfg.error_prob;
    q.n0 = cfg.n0;
    q.mse_model = model;
    q.collision_adjust = cfg.collision_adjust;
    q.pilot_draws = cfg.pilot_draws;
    q.seed = cfg.pilot_seed.value_or(cfg.campaign_seed);
    return required_ebn0(q);
}

ExperimentConfig resolve_power(const ExperimentConfig& cfg) {
    if (!cfg.ebn0_margin_db) return cfg;
    const auto pred = predicted_ebn0(cfg, MseModel::lmmse);
    if (!pred.feasible) throw ConfigError("ebn0_db = auto: the analysis finds no feasible power for this config");
    ExperimentConfig out = cfg;
    out.ebn0_db = pred.ebn0_db + *cfg.ebn0_margin_db;
    out.ebn0_margin_db.reset();
    return out;
}

CampaignReport run_campaign(const ExperimentConfig& cfg_in, Exec exec) {
    const ExperimentConfig cfg = resolve_power(cfg_in);
    cfg.validate();
    const PilotBook book = cfg.pilot_book();
    const PolarCodeSpec code = cfg.polar_code();

    CampaignReport rep;
    rep.config = cfg;
    rep.trials.resize(static_cast<std::size_t>(cfg.trials));
    if (exec == Exec::serial) {
        for (int t = 0; t < cfg.trials; ++t) rep.trials[static_cast<std::size_t>(t)] = run_trial(cfg, book, code, t);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < cfg.trials; ++t) rep.trials[static_cast<std::size_t>(t)] = run_trial(cfg, book, code, t);
    }

    // aggregation in trial order; independent of the worker count
    double md = 0.0, fa = 0.0, listed = 0.0, md_activity = 0.0;
    std::map<int, double> fa_by_size;
    for (const auto& t : rep.trials) {
        md += t.n_md;
        fa += t.n_fa;
        fa_by_size[t.list_size] += t.n_fa;
        listed += t.list_size;
        md_activity += std::min(t.missed_pilots, t.n_md);
        rep.identities_hold = rep.identities_hold && t.list_identity_holds();
    }
    const double users = static_cast<double>(cfg.active_users) * cfg.trials;
    // both as (sum / size) / trials so equal counts give bit-equal rates
    rep.p_md = md / cfg.active_users / cfg.trials;
    double fa_frac = 0.0;
    for (const auto& [size, count] : fa_by_size)
        if (size > 0) fa_frac += count / size;
    rep.p_fa = fa_frac / cfg.trials;
    rep.p_md_ci = wilson_interval(md, users);
    rep.p_fa_ci = wilson_interval(fa, listed);
    rep.p_md_activity = md > 0 ? md_activity / md : 0.0;
    return rep;
}

void write_campaign_csv(std::ostream& os, const CampaignReport& report) {
    const auto& cfg = report.config;
    os << "# ura-simulate v1\n";
    std::ostringstream conf;
    write_config(conf, cfg);
    std::istringstream lines(conf.str());
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
    os << "# p_pilot_lin=" << num(cfg.power_pilot()) << " p_pilot_db=" << num(lin_to_db(cfg.power_pilot()))
       << " p_data_lin=" << num(cfg.power_data()) << " p_data_db=" << num(lin_to_db(cfg.power_data()))
       << " ebn0_lin=" << num(cfg.ebn0()) << " ebn0_db=" << num(lin_to_db(cfg.ebn0())) << '\n';
    os << "trial,n_md,n_fa,list_size,support_f1,missed_pilots,decoded_rows,collisions,amp_iterations,amp_converged,"
          "padded,failure\n";
    for (const auto& t : report.trials) {
        std::string failure = t.failure;
        std::replace(failure.begin(), failure.end(), ',', ';');
        os << t.trial << ',' << t.n_md << ',' << t.n_fa << ',' << t.list_size << ',' << num(t.support_f1) << ','
           << t.missed_pilots << ',' << t.decoded_rows << ',' << t.collisions << ',' << t.amp_iterations << ','
           << (t.amp_converged ? 1 : 0) << ',' << t.padded << ',' << failure << '\n';
    }
    os << "# " << campaign_summary(report) << '\n';
}

std::string campaign_summary(const CampaignReport& r) {
    std::ostringstream os;
    os << "name=" << r.config.name << " trials=" << r.trials.size() << " ebn0_db=" << num(lin_to_db(r.config.ebn0()))
       << " p_md=" << num(r.p_md) << " [" << num(r.p_md_ci.lo) << "," << num(r.p_md_ci.hi) << "]"
       << " p_fa=" << num(r.p_fa) << " [" << num(r.p_fa_ci.lo) << "," << num(r.p_fa_ci.hi) << "]"
       << " pe=" << num(r.error_rate()) << " md_from_activity=" << num(r.p_md_activity)
       << " identities=" << (r.identities_hold ? "ok" : "BROKEN");
    return os.str();
}

// ---------------------------------------------------------------------------
// analysis and collision sweeps

std::vector<CurvePoint> analysis_curves(const ExperimentConfig& cfg, Exec exec) {
    cfg.validate();
    for (int k : cfg.ka_grid)
        if (k < 1 || k > cfg.pilot_length) throw ConfigError("ka_grid entries must be in [1, n_p]");
    const auto nk = static_cast<int>(cfg.ka_grid.size());
    std::vector<std::vector<CurvePoint>> per_k(static_cast<std::size_t>(nk));
    auto body = [&](int i) {
        const int ka = cfg.ka_grid[static_cast<std::size_t>(i)];
        EbN0Query q;
        q.active_users = ka;
        q.pilot_length = cfg.pilot_length;
        q.data_length = cfg.data_length;
        q.message_bits = cfg.message_bits;
        q.pilot_bits = cfg.pilot_bits;
        q.error_prob = cfg.error_prob;
        q.n0 = cfg.n0;
        q.collision_adjust = cfg.collision_adjust;
        q.pilot_draws = cfg.pilot_draws;
        q.seed = cfg.pilot_seed.value_or(cfg.campaign_seed);
        const LmmseMseModel model(cfg.pilot_bits, cfg.pilot_length, ka, cfg.pilot_draws, q.seed);
        for (MseModel mm : {MseModel::ortho, MseModel::lmmse})
            for (int m : cfg.m_grid) {
                q.antennas = m;
                q.mse_model = mm;
                per_k[static_cast<std::size_t>(i)].push_back({ka, m, mm, required_ebn0(q, &model)});
            }
    };
    if (exec == Exec::serial) {
        for (int i = 0; i < nk; ++i) body(i);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < nk; ++i) body(i);
    }
    std::vector<CurvePoint> out;
    for (auto& v : per_k) out.insert(out.end(), v.begin(), v.end());
    std::stable_sort(out.begin(), out.end(), [](const CurvePoint& a, const CurvePoint& b) {
        if (a.model != b.model) return a.model < b.model;
        if (a.antennas != b.antennas) return a.antennas < b.antennas;
        return a.active_users < b.active_users;
    });
    return out;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
    os << "K_a,M,mse_model,P_lin,ebn0_db,sinr,sigma_sq,rate_target\n";
    for (const auto& p : points) {
        const auto& r = p.result;
        os << p.active_users << ',' << p.antennas << ',' << to_string(p.model) << ',' << num(r.power) << ','
           << num(r.ebn0_db) << ',' << num(r.sinr) << ',' << num(r.mse) << ',' << num(r.rate_target) << '\n';
    }
}

PolarCodeSpec collision_code(const ExperimentConfig& cfg) {
    const double design = cfg.collide_design_snr_db ? db_to_lin(*cfg.collide_design_snr_db)
                                                    : cfg.collide_antennas * db_to_lin(cfg.collide_snr_db);
    return construct_polar_snr(cfg.block_length(), cfg.payload_bits(), cfg.crc_bits, design, cfg.list_size);
}

std::vector<CollisionPoint> collision_curve(const ExperimentConfig& cfg, Exec exec) {
    return collision_sweep(cfg.collide_antennas, db_to_lin(cfg.collide_snr_db), cfg.sigma_est_db, cfg.trials,
                           collision_code(cfg), cfg.campaign_seed, exec);
}

void write_collision_csv(std::ostream& os, const std::vector<CollisionPoint>& points) {
    os << "sigma_est_db,both,one,none,at_least_one,trials\n";
    for (const auto& p : points)
        os << num(p.sigma_est_db) << ',' << num(p.frac_both()) << ',' << num(p.frac_one()) << ',' << num(p.frac_none())
           << ',' << num(p.frac_at_least_one()) << ',' << p.trials << '\n';
}

}  // namespace ura
