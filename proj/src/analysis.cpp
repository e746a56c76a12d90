#include "ura/analysis.hpp"

#include "ura/pilots.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ura {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inverse: p must be in (0, 1)");
    // Q is strictly decreasing; Q(-40) = 1 and Q(40) = 0 in double precision
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > p)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    // one Newton polish; Q'(x) = -phi(x)
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf > 1e-300) {
        const double next = x + (q_function(x) - p) / pdf;
        if (std::abs(next - x) < 1e-10) x = next;
    }
    return x;
}

double ortho_mse(double pilot_length, double power, double lsfc, double n0) {
    return n0 / (n0 + pilot_length * power * lsfc);
}

double sinr_mrc(int antennas, double mse, double lsfc, double power, double n0, double interference) {
    const double num = antennas * (1.0 - mse) * lsfc * power;
    const double den = n0 + mse * lsfc * power + interference;
    if (den <= 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return num / den;
}

double dispersion(double sinr) {
    const double log2e = std::numbers::log2e;
    return 0.5 * sinr * (sinr + 2.0) / ((sinr + 1.0) * (sinr + 1.0)) * log2e * log2e;
}

namespace {

double unclamped_rate(double sinr, int data_length, double error_prob) {
    const double capacity = 0.5 * std::log2(1.0 + sinr);
    return capacity - std::sqrt(dispersion(sinr) / (2.0 * data_length)) * q_inverse(error_prob);
}

}  // namespace

RateResult normal_approx_rate(double sinr, int data_length, double error_prob) {
    if (sinr < 0.0) throw std::domain_error("normal_approx_rate: negative SINR");
    if (data_length < 1) throw std::domain_error("normal_approx_rate: data length must be >= 1");
    const double r = unclamped_rate(sinr, data_length, error_prob);
    if (r <= 0.0) return {0.0, true};
    return {r, false};
}

double required_sinr(double rate, int data_length, double error_prob) {
    if (!(rate > 0.0)) throw std::domain_error("required_sinr: rate must be positive");
    double lo = 1e-9, hi = 1e6;
    if (unclamped_rate(hi, data_length, error_prob) < rate)
        throw std::domain_error("required_sinr: rate not reachable below SINR 1e6");
    if (unclamped_rate(lo, data_length, error_prob) >= rate) return lo;
    // bisection in log scale; the unclamped rate crosses `rate` once on the bracket
    while ((hi - lo) > 1e-13 * hi) {
        const double mid = std::sqrt(lo * hi);
        const double m = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
        if (unclamped_rate(m, data_length, error_prob) >= rate)
            hi = m;
        else
            lo = m;
        if (m == lo && m == hi) break;
    }
    return hi;
}

double expected_collisions(int active_users, double pool_size, int order) {
    if (order < 2) throw std::domain_error("expected_collisions: order must be >= 2");
    if (active_users < order) return 0.0;
    const double k = active_users;
    const double log_binom = std::lgamma(k + 1.0) - std::lgamma(order + 1.0) - std::lgamma(k - order + 1.0);
    return std::exp(log_binom - (order - 1) * std::log(pool_size));
}

std::string to_string(MseModel m) { return m == MseModel::ortho ? "ortho" : "lmmse"; }

MseModel parse_mse_model(const std::string& s) {
    if (s == "ortho") return MseModel::ortho;
    if (s == "lmmse") return MseModel::lmmse;
    throw ConfigError("unknown mse model '" + s + "' (expected ortho or lmmse)");
}

LmmseMseModel::LmmseMseModel(int pool_bits, int pilot_length, int active_users, int draws, std::uint64_t seed) {
    const std::int64_t pool = std::int64_t{1} << pool_bits;
    if (active_users < 1 || active_users > pool) throw ConfigError("lmmse model: K_a must be in [1, N]");
    for (int d = 0; d < draws; ++d) {
        const PilotBook book(pool, pilot_length, seed + static_cast<std::uint64_t>(d));
        // independent stream for the supports; prefixes are nested across K_a
        Rng support_rng(seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL + static_cast<std::uint64_t>(d));
        const auto support = sample_without_replacement(pool, active_users, support_rng);

        // Gram matrix of DFT columns: G(j, l) = c((s_l - s_j) mod N), c(t) = sum_i w^{r_i t}
        const CMatrix ones = CMatrix::Ones(pilot_length, 1);
        const CMatrix c = book.adjoint(ones, Exec::serial);  // c(t) = sum_i conj(w^{r_i t})
        CMatrix gram(active_users, active_users);
        for (int j = 0; j < active_users; ++j)
            for (int l = 0; l < active_users; ++l) {
                const std::int64_t t = ((support[static_cast<std::size_t>(l)] - support[static_cast<std::size_t>(j)]) % pool + pool) % pool;
                gram(j, l) = std::conj(c(t, 0));
            }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("lmmse model: eigenvalue solver failed");
        eig_.push_back(es.eigenvalues().cwiseMax(0.0));
    }
}

namespace {

double draw_mean(const RVector& eig, double power, double n0) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < eig.size(); ++j) s += n0 / (n0 + power * eig(j));
    return s / static_cast<double>(eig.size());
}

}  // namespace

double LmmseMseModel::mean_mse(double power, double n0) const {
    double s = 0.0;
    for (const auto& e : eig_) s += draw_mean(e, power, n0);
    return s / static_cast<double>(eig_.size());
}

double LmmseMseModel::spread(double power, double n0) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& e : eig_) {
        const double v = draw_mean(e, power, n0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return eig_.empty() ? 0.0 : hi - lo;
}

double ebn0_linear(int pilot_length, int data_length, int message_bits, double p_pilot, double p_data, double n0) {
    return (pilot_length * p_pilot + data_length * p_data) / (message_bits * n0);
}

EbN0Result required_ebn0(const EbN0Query& q) {
    if (q.mse_model == MseModel::lmmse) {
        const LmmseMseModel model(q.pilot_bits, q.pilot_length, q.active_users, q.pilot_draws, q.seed);
        return required_ebn0(q, &model);
    }
    return required_ebn0(q, nullptr);
}

EbN0Result required_ebn0(const EbN0Query& q, const LmmseMseModel* lmmse) {
    if (q.message_bits <= q.pilot_bits) throw ConfigError("required_ebn0: B must exceed J");
    if (q.mse_model == MseModel::lmmse && !lmmse) throw ConfigError("required_ebn0: lmmse model not supplied");
    EbN0Result r;
    r.rate_target = static_cast<double>(q.message_bits - q.pilot_bits) / (2.0 * q.data_length);
    r.effective_error_prob = q.error_prob;
    if (q.collision_adjust) {
        const double pool = std::ldexp(1.0, q.pilot_bits);
        r.effective_error_prob -= 2.0 * expected_collisions(q.active_users, pool, 2) / q.active_users;
    }
    if (!(r.effective_error_prob > 0.0))
        throw std::domain_error("required_ebn0: collision loss exceeds the error budget");
    r.target_sinr = required_sinr(r.rate_target, q.data_length, r.effective_error_prob);

    auto mse_at = [&](double p) {
        return q.mse_model == MseModel::ortho ? ortho_mse(q.pilot_length, p, 1.0, q.n0) : lmmse->mean_mse(p, q.n0);
    };
    auto sinr_at = [&](double p) {
        return sinr_mrc(q.antennas, mse_at(p), 1.0, p, q.n0, (q.active_users - 1) * p);
    };

    double lo = 1e-12 * q.n0, hi = 1e6 * q.n0;
    if (sinr_at(hi) < r.target_sinr) {
        r.feasible = false;
        r.power = std::numeric_limits<double>::infinity();
        r.ebn0_db = std::numeric_limits<double>::infinity();
        r.sinr = sinr_at(hi);
        r.mse = mse_at(hi);
        return r;
    }
    // SINR is increasing in P: every term of 1/SINR decreases
    while (hi - lo > 1e-10 * hi) {
        const double mid = std::sqrt(lo * hi);
        if (sinr_at(mid) >= r.target_sinr)
            hi = mid;
        else
            lo = mid;
        ++r.bisection_steps;
    }
    r.feasible = true;
    r.power = hi;
    r.sinr = sinr_at(hi);
    r.mse = mse_at(hi);
    if (lmmse && q.mse_model == MseModel::lmmse) r.mse_spread = lmmse->spread(hi, q.n0);
    r.ebn0_db = lin_to_db(ebn0_linear(q.pilot_length, q.data_length, q.message_bits, hi, hi, q.n0));
    return r;
}

}  // namespace ura
