#pragma once

#include "ura/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ura {

// Gaussian tail function and its inverse.
double q_function(double x);
double q_inverse(double p);

/// Channel-estimation MSE with orthogonal pilots, N0 / (N0 + n_p P g).
/// A lower bound on the LMMSE error for any pilot matrix with columns of norm^2 n_p.
double ortho_mse(double pilot_length, double power, double lsfc, double n0);

/// Post-MRC SINR approximation
///   M (1 - s) g P / (N0 + s g P + interference),  interference = sum_{j != k} g_j P.
double sinr_mrc(int antennas, double mse, double lsfc, double power, double n0, double interference);

struct RateResult {
    double rate;   // bits per real channel use, >= 0
    bool clamped;  // dispersion penalty exceeded capacity
};

/// Normal approximation of the achievable rate of a length-2 n_d real block
/// code on an AWGN channel with the given SNR and block error probability.
RateResult normal_approx_rate(double sinr, int data_length, double error_prob);

/// Channel dispersion in bits^2.
double dispersion(double sinr);

/// Smallest SINR at which normal_approx_rate reaches `rate`.
double required_sinr(double rate, int data_length, double error_prob);

/// E{C_k} = C(K_a, k) / N^(k-1): expected number of k-user pilot collisions.
double expected_collisions(int active_users, double pool_size, int order);

enum class MseModel { ortho, lmmse };

std::string to_string(MseModel m);
MseModel parse_mse_model(const std::string& s);

/// Parameters of one point of the required-energy curve. Powers are
/// per-symbol with P_pilot = P_data = P; g_k = 1 for every user.
struct EbN0Query {
    int active_users = 100;
    int antennas = 50;
    int pilot_length = 1152;
    int data_length = 2048;
    int message_bits = 100;
    int pilot_bits = 16;
    double error_prob = 0.05;
    double n0 = 1.0;
    MseModel mse_model = MseModel::ortho;
    bool collision_adjust = true;
    /// Random pilot books averaged for the lmmse model.
    int pilot_draws = 10;
    std::uint64_t seed = 1;
};

struct EbN0Result {
    bool feasible = false;
    double power = 0.0;      // linear P per symbol, N0 units
    double ebn0_db = 0.0;    // +inf when infeasible
    double sinr = 0.0;       // achieved at `power`
    double target_sinr = 0.0;
    double mse = 0.0;        // average per-user sigma^2 at `power`
    double mse_spread = 0.0; // max - min of the per-draw average (lmmse model)
    double rate_target = 0.0;
    double effective_error_prob = 0.0;
    int bisection_steps = 0;
};

/// Per-draw eigenvalues of A_I^H A_I for random supports of size K_a; the
/// average LMMSE error at power P is then mean_j N0 / (N0 + P lambda_j).
class LmmseMseModel {
public:
    LmmseMseModel(int pool_bits, int pilot_length, int active_users, int draws, std::uint64_t seed);
    /// Average of diag(C_e) over users and draws.
    double mean_mse(double power, double n0) const;
    /// max - min over draws of the per-draw average.
    double spread(double power, double n0) const;
    const std::vector<RVector>& eigenvalues() const { return eig_; }

private:
    std::vector<RVector> eig_;
};

/// Smallest per-symbol power meeting the SINR target, and the resulting Eb/N0.
EbN0Result required_ebn0(const EbN0Query& q);
/// Same, reusing a precomputed lmmse MSE model (ignored for the ortho model).
EbN0Result required_ebn0(const EbN0Query& q, const LmmseMseModel* lmmse);

/// Eb/N0 = (n_p P_pilot + n_d P_data) / (B N0).
double ebn0_linear(int pilot_length, int data_length, int message_bits, double p_pilot, double p_data, double n0);

}  // namespace ura
