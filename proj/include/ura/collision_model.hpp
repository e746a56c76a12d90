#pragma once

#include "ura/common.hpp"
#include "ura/polar.hpp"

#include <cstdint>
#include <vector>

namespace ura {

enum class CollisionOutcome { none = 0, one = 1, both = 2 };

/// One draw of the two-user pilot-collision model
///   s_hat^T = (1/M) h_hat^H (sqrt(snr) h1 s1^T + sqrt(snr) h2 s2^T + Z),
///   h_hat = h1 + h2 + e,  e ~ CN(0, sigma_est_sq I_M),  Z iid CN(0, 1).
/// Both users encode a random payload with `code`; s_hat is demodulated to
/// Gray-QPSK LLRs and list-decoded once. The outcome counts how many of the
/// two payloads are among the CRC-valid candidates.
CollisionOutcome collision_model_trial(int antennas, double snr, double sigma_est_sq, const PolarCodeSpec& code,
                                       Rng& rng);

/// Soft symbols of the model after normalization by the conditional mean gain
/// sqrt(snr) ||h_hat||^2 / (M (2 + sigma_est_sq)); `noise_var` is the matching
/// effective noise variance (thermal plus channel uncertainty).
struct CollisionSoft {
    CVector symbols;
    double noise_var;
};

CollisionSoft collision_model_symbols(const CVector& s1, const CVector& s2, int antennas, double snr,
                                      double sigma_est_sq, Rng& rng);

struct CollisionPoint {
    double sigma_est_db = 0.0;
    int trials = 0;
    int both = 0;
    int one = 0;
    int none = 0;
    double frac_both() const { return trials ? static_cast<double>(both) / trials : 0.0; }
    double frac_one() const { return trials ? static_cast<double>(one) / trials : 0.0; }
    double frac_none() const { return trials ? static_cast<double>(none) / trials : 0.0; }
    double frac_at_least_one() const { return trials ? static_cast<double>(both + one) / trials : 0.0; }
};

/// Sweeps the estimation-error variance. Trial t of point p uses the RNG
/// stream seeded with seed + p * 1'000'003 + t.
std::vector<CollisionPoint> collision_sweep(int antennas, double snr, const std::vector<double>& sigma_est_db,
                                            int trials, const PolarCodeSpec& code, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

}  // namespace ura
