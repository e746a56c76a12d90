#pragma once

#include "ura/common.hpp"
#include "ura/pilots.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace ura {

struct AmpConfig {
    int max_iters = 50;
    /// Weight of the new denoiser output in the X update, in (0, 1].
    double damping = 0.7;
    /// Prior probability that a pilot is in use (K_a / N).
    double sparsity = 0.0;
    /// Received pilot power P_pilot * g of an active row.
    double prior_power = 1.0;
    /// Relative change of X below which iterations stop.
    double tolerance = 1e-6;
    /// Support rule: exactly one of these must be set.
    std::optional<int> known_active;
    std::optional<double> threshold;
    Exec exec = Exec::parallel;

    void validate() const;
};

struct AmpResult {
    CMatrix x_hat;                      // N x M, estimate of Gamma^{1/2} H
    std::vector<double> gamma_hat;      // ||x_hat_k||^2 / M
    std::vector<std::int64_t> support;  // sorted ascending
    std::vector<double> tau_trace;      // effective noise level per iteration
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
};

/// Optional per-iteration CSV dump: iteration,tau2,support_f1.
struct AmpDebug {
    std::ostream* csv = nullptr;
    std::vector<std::int64_t> true_support;
};

/// Row denoiser of the Bernoulli-Gaussian MMV prior: a row is zero with
/// probability 1 - sparsity, otherwise CN(0, prior_power I_M).
struct RowShrinkage {
    double activity;  // posterior probability that the row is active
    double factor;    // prior_power / (prior_power + tau2)
    double gain() const { return activity * factor; }
};

RowShrinkage row_shrinkage(double row_norm_sq, double tau2, double prior_power, double sparsity, int antennas);

/// K-largest selection, ties broken toward the lower index. Returned sorted.
std::vector<std::int64_t> select_largest(const std::vector<double>& power, int count);
std::vector<std::int64_t> select_above(const std::vector<double>& power, double threshold);

/// Dense sensing matrix with the same interface as PilotBook; the serial
/// reference path for the FFT operators.
class DenseOperator {
public:
    explicit DenseOperator(CMatrix a) : a_(std::move(a)) {}
    std::int64_t pool_size() const { return a_.cols(); }
    std::int64_t pilot_length() const { return a_.rows(); }
    CMatrix forward(const CMatrix& x, Exec = Exec::serial) const { return a_ * x; }
    CMatrix adjoint(const CMatrix& z, Exec = Exec::serial) const { return a_.adjoint() * z; }
    const CMatrix& matrix() const { return a_; }

private:
    CMatrix a_;
};

/// Iteration state in the unit-column normalization: the sensing matrix is
/// A / sqrt(n_p) and the unknown is sqrt(n_p) X.
struct AmpState {
    CMatrix x;         // N x M
    CMatrix residual;  // n_p x M
    double tau2 = 0.0;
};

namespace detail {

double amp_denoise(const CMatrix& pseudo, double tau2, const AmpConfig& cfg, double prior_scaled, CMatrix& out);

}  // namespace detail

/// One MMV-AMP iteration: denoise X + A^H R / sqrt(n_p) with the Bernoulli-Gaussian
/// row denoiser, damp, and refresh the residual with the scalar Onsager term.
template <class Op>
void amp_step(const Op& op, const CMatrix& y, const AmpConfig& cfg, AmpState& st) {
    const double np = static_cast<double>(op.pilot_length());
    const double n = static_cast<double>(op.pool_size());
    const double scale = 1.0 / std::sqrt(np);
    const double m = static_cast<double>(y.cols());

    st.tau2 = st.residual.squaredNorm() / (np * m);
    const CMatrix pseudo = st.x + scale * op.adjoint(st.residual, cfg.exec);

    CMatrix denoised(pseudo.rows(), pseudo.cols());
    const double mean_gain = detail::amp_denoise(pseudo, st.tau2, cfg, cfg.prior_power * np, denoised);

    st.x = cfg.damping * denoised + (1.0 - cfg.damping) * st.x;
    const double onsager = (n / np) * mean_gain;
    st.residual = y - scale * op.forward(st.x, cfg.exec) + onsager * st.residual;
}

template <class Op>
AmpResult run_amp(const CMatrix& y, const Op& op, const AmpConfig& cfg, const AmpDebug* debug = nullptr);

AmpResult run_mmv_amp(const CMatrix& y, const PilotBook& book, const AmpConfig& cfg, const AmpDebug* debug = nullptr);
AmpResult run_mmv_amp(const CMatrix& y, const DenseOperator& op, const AmpConfig& cfg, const AmpDebug* debug = nullptr);

/// Support F1 score against a reference set.
double support_f1(const std::vector<std::int64_t>& detected, const std::vector<std::int64_t>& truth);

}  // namespace ura
