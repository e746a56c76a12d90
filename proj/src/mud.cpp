#include "ura/mud.hpp"

#include "ura/analysis.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <string>

namespace ura {

namespace {

CMatrix weighted_columns(const PilotBook& book, std::span<const std::int64_t> support, std::span<const double> gamma) {
    if (support.size() != gamma.size()) throw ShapeError("lmmse: support and gamma lengths differ");
    CMatrix b = book.columns(support);
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (gamma[k] < 0.0) throw ConfigError("lmmse: negative gamma");
        b.col(static_cast<Eigen::Index>(k)) *= std::sqrt(gamma[k]);
    }
    return b;
}

Eigen::LLT<CMatrix> factor(const CMatrix& m, const char* what) {
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError(std::string("lmmse: ") + what + " is not positive definite");
    return llt;
}

}  // namespace

CMatrix error_covariance(const PilotBook& book, std::span<const std::int64_t> support, std::span<const double> gamma,
                         double n0, LmmseForm form) {
    const CMatrix b = weighted_columns(book, support, gamma);
    const auto k = b.cols();
    if (form == LmmseForm::reduced) {
        CMatrix g = b.adjoint() * b;
        g.diagonal().array() += n0;
        const auto llt = factor(g, "B^H B + N0 I");
        return n0 * llt.solve(CMatrix::Identity(k, k));
    }
    CMatrix s = b * b.adjoint();
    s.diagonal().array() += n0;
    const auto llt = factor(s, "B B^H + N0 I");
    return CMatrix::Identity(k, k) - b.adjoint() * llt.solve(b);
}

ChannelEstimate lmmse_estimate(const CMatrix& y_pilot, const PilotBook& book, std::span<const std::int64_t> support,
                               std::span<const double> gamma, double n0, LmmseForm form) {
    if (y_pilot.rows() != book.pilot_length()) throw ShapeError("lmmse: Y_p rows differ from n_p");
    const CMatrix b = weighted_columns(book, support, gamma);
    const auto k = b.cols();

    ChannelEstimate est;
    est.support.assign(support.begin(), support.end());
    est.gamma.assign(gamma.begin(), gamma.end());
    CMatrix cov;
    if (form == LmmseForm::reduced) {
        CMatrix g = b.adjoint() * b;
        g.diagonal().array() += n0;
        const auto llt = factor(g, "B^H B + N0 I");
        est.h_hat = llt.solve(b.adjoint() * y_pilot);
        cov = n0 * llt.solve(CMatrix::Identity(k, k));
    } else {
        CMatrix s = b * b.adjoint();
        s.diagonal().array() += n0;
        const auto llt = factor(s, "B B^H + N0 I");
        est.h_hat = b.adjoint() * llt.solve(y_pilot);
        cov = CMatrix::Identity(k, k) - b.adjoint() * llt.solve(b);
    }
    est.mse.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) est.mse[static_cast<std::size_t>(i)] = cov(i, i).real();
    return est;
}

CMatrix mrc_combine(const CMatrix& y_data, const ChannelEstimate& est) {
    if (y_data.cols() != est.h_hat.cols()) throw ShapeError("mrc: antenna count differs between Y_d and H_hat");
    CMatrix s = est.h_hat.conjugate() * y_data.transpose();
    for (Eigen::Index k = 0; k < s.rows(); ++k) {
        const double g = est.gamma[static_cast<std::size_t>(k)];
        s.row(k) *= g > 0.0 ? 1.0 / std::sqrt(g) : 0.0;
    }
    return s;
}

CVector qpsk_modulate(const Bits& bits) {
    if (bits.size() % 2 != 0) throw ShapeError("qpsk: odd number of bits");
    const double a = 1.0 / std::numbers::sqrt2;
    CVector s(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const auto b0 = bits[static_cast<std::size_t>(2 * i)];
        const auto b1 = bits[static_cast<std::size_t>(2 * i + 1)];
        s(i) = cplx(b0 ? -a : a, b1 ? -a : a);
    }
    return s;
}

RVector qpsk_llr(const Eigen::Ref<const CVector>& symbols, double noise_var) {
    const double scale = 2.0 * std::numbers::sqrt2 / noise_var;
    RVector llr(2 * symbols.size());
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        llr(2 * i) = scale * symbols(i).real();
        llr(2 * i + 1) = scale * symbols(i).imag();
    }
    return llr;
}

namespace {

double empirical_noise(const Eigen::Ref<const CVector>& s) {
    const double a = 1.0 / std::numbers::sqrt2;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const cplx hard(s(i).real() >= 0 ? a : -a, s(i).imag() >= 0 ? a : -a);
        acc += std::norm(s(i) - hard);
    }
    return std::max(acc / static_cast<double>(s.size()), 1e-12);
}

}  // namespace

SoftSequences mrc_detect(const CMatrix& y_data, const ChannelEstimate& est, const MrcParams& params, Exec exec) {
    if (y_data.cols() != est.h_hat.cols()) throw ShapeError("mrc: antenna count differs between Y_d and H_hat");
    const CMatrix raw = est.h_hat.conjugate() * y_data.transpose();
    const auto rows = static_cast<std::int64_t>(raw.rows());
    const int antennas = static_cast<int>(est.h_hat.cols());

    double total_power = 0.0;
    for (double g : est.gamma) total_power += g / params.p_pilot * params.p_data;

    SoftSequences out;
    out.s_hat = CMatrix::Zero(raw.rows(), raw.cols());
    out.llr = RMatrix::Zero(raw.rows(), 2 * raw.cols());
    out.sinr.assign(static_cast<std::size_t>(rows), 0.0);
    out.valid.assign(static_cast<std::size_t>(rows), 0);

    auto body = [&](std::int64_t k) {
        const auto ku = static_cast<std::size_t>(k);
        const double g = est.gamma[ku] / params.p_pilot;
        const double mse = est.mse[ku];
        if (!(g > 0.0) || !(mse < 1.0)) return;
        const double signal = g * params.p_data;
        const double norm = antennas * (1.0 - mse) * std::sqrt(signal);
        out.s_hat.row(k) = raw.row(k) / norm;
        const double sinr = sinr_mrc(antennas, mse, g, params.p_data, params.n0, total_power - signal);
        const CVector row = out.s_hat.row(k).transpose();
        const double noise =
            params.noise == LlrNoise::analytic ? std::max(1.0 / std::max(sinr, 1e-300), 1e-12) : empirical_noise(row);
        out.llr.row(k) = qpsk_llr(row, noise).transpose();
        out.sinr[ku] = params.noise == LlrNoise::analytic ? sinr : 1.0 / noise;
        out.valid[ku] = 1;
    };
    if (exec == Exec::serial) {
        for (std::int64_t k = 0; k < rows; ++k) body(k);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < rows; ++k) body(k);
    }
    return out;
}

}  // namespace ura
