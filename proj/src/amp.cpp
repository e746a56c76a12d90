#include "ura/amp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace ura {

namespace {

// smallest effective noise level used inside the denoiser; keeps the
// posterior finite when the residual vanishes
constexpr double kTauFloor = 1e-250;
constexpr double kDivergenceFactor = 1e3;

std::vector<double> row_powers(const CMatrix& x) {
    std::vector<double> p(static_cast<std::size_t>(x.rows()));
    const double m = static_cast<double>(x.cols());
    for (Eigen::Index k = 0; k < x.rows(); ++k) p[static_cast<std::size_t>(k)] = x.row(k).squaredNorm() / m;
    return p;
}

}  // namespace

void AmpConfig::validate() const {
    if (max_iters < 1) throw ConfigError("amp: max_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("amp: damping must be in (0, 1]");
    if (!(sparsity > 0.0 && sparsity < 1.0)) throw ConfigError("amp: sparsity must be in (0, 1)");
    if (!(prior_power > 0.0)) throw ConfigError("amp: prior_power must be positive");
    if (known_active.has_value() == threshold.has_value())
        throw ConfigError("amp: set exactly one of known_active / threshold");
    if (known_active && *known_active < 0) throw ConfigError("amp: known_active must be >= 0");
}

RowShrinkage row_shrinkage(double row_norm_sq, double tau2, double prior_power, double sparsity, int antennas) {
    tau2 = std::max(tau2, kTauFloor);
    const double factor = prior_power / (prior_power + tau2);
    // log of the inactive/active likelihood ratio times the prior odds
    const double log_odds = std::log1p(-sparsity) - std::log(sparsity) +
                            antennas * std::log1p(prior_power / tau2) -
                            row_norm_sq * prior_power / (tau2 * (prior_power + tau2));
    double activity;
    if (log_odds > 0) {
        const double e = std::exp(-log_odds);
        activity = e / (1.0 + e);
    } else {
        activity = 1.0 / (1.0 + std::exp(log_odds));
    }
    return {activity, factor};
}

std::vector<std::int64_t> select_largest(const std::vector<double>& power, int count) {
    std::vector<std::int64_t> idx(power.size());
    std::iota(idx.begin(), idx.end(), 0);
    count = std::clamp(count, 0, static_cast<int>(power.size()));
    std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) {
        return power[static_cast<std::size_t>(a)] > power[static_cast<std::size_t>(b)];
    });
    idx.resize(static_cast<std::size_t>(count));
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<std::int64_t> select_above(const std::vector<double>& power, double threshold) {
    std::vector<std::int64_t> idx;
    for (std::size_t k = 0; k < power.size(); ++k)
        if (power[k] > threshold) idx.push_back(static_cast<std::int64_t>(k));
    return idx;
}

double support_f1(const std::vector<std::int64_t>& detected, const std::vector<std::int64_t>& truth) {
    if (detected.empty() && truth.empty()) return 1.0;
    const std::set<std::int64_t> t(truth.begin(), truth.end());
    std::size_t hits = 0;
    for (auto d : detected) hits += t.count(d);
    return 2.0 * static_cast<double>(hits) / static_cast<double>(detected.size() + t.size());
}

namespace detail {

double amp_denoise(const CMatrix& pseudo, double tau2, const AmpConfig& cfg, double prior_scaled, CMatrix& out) {
    const auto rows = static_cast<std::int64_t>(pseudo.rows());
    const int antennas = static_cast<int>(pseudo.cols());
    std::vector<double> gains(static_cast<std::size_t>(rows));
    auto body = [&](std::int64_t k) {
        const auto s = row_shrinkage(pseudo.row(k).squaredNorm(), tau2, prior_scaled, cfg.sparsity, antennas);
        gains[static_cast<std::size_t>(k)] = s.gain();
        out.row(k) = s.gain() * pseudo.row(k);
    };
    if (cfg.exec == Exec::serial) {
        for (std::int64_t k = 0; k < rows; ++k) body(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < rows; ++k) body(k);
    }
    // serial reduction keeps the result independent of the thread count
    double sum = 0.0;
    for (double g : gains) sum += g;
    return sum / static_cast<double>(rows);
}

}  // namespace detail

template <class Op>
AmpResult run_amp(const CMatrix& y, const Op& op, const AmpConfig& cfg, const AmpDebug* debug) {
    cfg.validate();
    if (y.rows() != op.pilot_length())
        throw ShapeError("amp: Y_p has " + std::to_string(y.rows()) + " rows, expected n_p=" +
                         std::to_string(op.pilot_length()));
    const double np = static_cast<double>(op.pilot_length());
    const double m = static_cast<double>(y.cols());

    AmpState st;
    st.x = CMatrix::Zero(op.pool_size(), y.cols());
    st.residual = y;
    const double tau_initial = std::max(y.squaredNorm() / (np * m), kTauFloor);

    AmpResult res;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const CMatrix previous = st.x;
        amp_step(op, y, cfg, st);
        res.tau_trace.push_back(st.tau2);
        res.iterations = it + 1;

        if (debug && debug->csv) {
            const auto p = row_powers(st.x);
            const int k = cfg.known_active ? *cfg.known_active : static_cast<int>(debug->true_support.size());
            *debug->csv << (it + 1) << ',' << st.tau2 << ',' << support_f1(select_largest(p, k), debug->true_support)
                        << '\n';
        }

        if (!std::isfinite(st.tau2) || st.tau2 > kDivergenceFactor * tau_initial) {
            res.diverged = true;
            break;
        }
        const double base = previous.norm();
        const double change = (st.x - previous).norm();
        if (change == 0.0 || (base > 0.0 && change / base < cfg.tolerance)) {
            res.converged = true;
            break;
        }
    }

    res.x_hat = st.x / std::sqrt(np);
    res.gamma_hat = row_powers(res.x_hat);
    res.support = cfg.known_active ? select_largest(res.gamma_hat, *cfg.known_active)
                                   : select_above(res.gamma_hat, *cfg.threshold);
    return res;
}

template AmpResult run_amp<PilotBook>(const CMatrix&, const PilotBook&, const AmpConfig&, const AmpDebug*);
template AmpResult run_amp<DenseOperator>(const CMatrix&, const DenseOperator&, const AmpConfig&, const AmpDebug*);

AmpResult run_mmv_amp(const CMatrix& y, const PilotBook& book, const AmpConfig& cfg, const AmpDebug* debug) {
    return run_amp(y, book, cfg, debug);
}

AmpResult run_mmv_amp(const CMatrix& y, const DenseOperator& op, const AmpConfig& cfg, const AmpDebug* debug) {
    return run_amp(y, op, cfg, debug);
}

}  // namespace ura
