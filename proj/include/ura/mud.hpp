#pragma once

#include "ura/common.hpp"
#include "ura/pilots.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ura {

/// Channel estimate on a detected support. Rows of h_hat align with `support`.
struct ChannelEstimate {
    CMatrix h_hat;                      // |I| x M
    std::vector<std::int64_t> support;
    std::vector<double> gamma;          // P_pilot * g used for each row
    std::vector<double> mse;            // diag(C_e)
};

enum class LmmseForm {
    reduced,  // |I| x |I| system: (B^H B + N0 I)^{-1} B^H Y
    full      // n_p x n_p system: B^H (B B^H + N0 I)^{-1} Y
};

/// LMMSE estimate of H on `support` from the pilot observation, with
/// B = A_I diag(sqrt(gamma)). Both forms are algebraically identical.
ChannelEstimate lmmse_estimate(const CMatrix& y_pilot, const PilotBook& book, std::span<const std::int64_t> support,
                               std::span<const double> gamma, double n0, LmmseForm form = LmmseForm::reduced);

/// Error covariance C_e = I - B^H (B B^H + N0 I)^{-1} B = N0 (B^H B + N0 I)^{-1}.
CMatrix error_covariance(const PilotBook& book, std::span<const std::int64_t> support, std::span<const double> gamma,
                         double n0, LmmseForm form = LmmseForm::reduced);

enum class LlrNoise {
    analytic,  // 1 / SINR_k from the post-MRC SINR approximation
    empirical  // per-row residual variance after a hard QPSK decision
};

struct MrcParams {
    double p_pilot = 1.0;
    double p_data = 1.0;
    double n0 = 1.0;
    LlrNoise noise = LlrNoise::analytic;
};

struct SoftSequences {
    CMatrix s_hat;               // |I| x n_d, unit mean signal amplitude per row
    RMatrix llr;                 // |I| x 2 n_d, log P(b=0)/P(b=1)
    std::vector<double> sinr;    // per-row effective SINR used for the LLRs
    std::vector<std::uint8_t> valid; // 0 when the row's power estimate was zero
};

/// Unnormalized combiner output Gamma^{-1/2} conj(H_hat) Y_d^T (|I| x n_d).
CMatrix mrc_combine(const CMatrix& y_data, const ChannelEstimate& est);

/// MRC detection, per-row normalization by M (1 - sigma_k^2) sqrt(P_data g_k),
/// and Gray-QPSK LLRs.
SoftSequences mrc_detect(const CMatrix& y_data, const ChannelEstimate& est, const MrcParams& params,
                         Exec exec = Exec::parallel);

/// Gray QPSK, bit pairs (b_2i, b_2i+1) -> ((1 - 2 b_2i) + j (1 - 2 b_2i+1)) / sqrt(2).
CVector qpsk_modulate(const Bits& bits);

/// LLRs of Gray QPSK symbols observed as s + CN(0, noise_var).
RVector qpsk_llr(const Eigen::Ref<const CVector>& symbols, double noise_var);

}  // namespace ura
