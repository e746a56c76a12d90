#include "ura/collision_model.hpp"

#include "ura/mud.hpp"

#include <algorithm>
#include <cmath>

namespace ura {

CollisionSoft collision_model_symbols(const CVector& s1, const CVector& s2, int antennas, double snr,
                                      double sigma_est_sq, Rng& rng) {
    if (s1.size() != s2.size()) throw ShapeError("collision model: sequence lengths differ");
    const double m = antennas;
    const CMatrix h = complex_normal_matrix(rng, antennas, 2, 1.0);
    const CVector e = complex_normal_matrix(rng, antennas, 1, sigma_est_sq).col(0);
    const CVector h_hat = h.col(0) + h.col(1) + e;
    const CMatrix z = complex_normal_matrix(rng, antennas, s1.size(), 1.0);

    const double amp = std::sqrt(snr);
    CMatrix y = z;
    y.noalias() += amp * h.col(0) * s1.transpose();
    y.noalias() += amp * h.col(1) * s2.transpose();
    const CVector s_hat = (h_hat.adjoint() * y).transpose() / m;

    // E[h_k | h_hat] = h_hat / (2 + sigma^2); residual per-entry variance v
    const double spread = 2.0 + sigma_est_sq;
    const double energy = h_hat.squaredNorm();
    const double gain = amp * energy / (m * spread);
    const double v = 1.0 - 1.0 / spread;
    const double noise_raw = energy / (m * m) * (1.0 + 2.0 * v * snr);

    CollisionSoft out;
    if (gain <= 0.0) {
        out.symbols = CVector::Zero(s1.size());
        out.noise_var = 1.0;
        return out;
    }
    out.symbols = s_hat / gain;
    out.noise_var = noise_raw / (gain * gain);
    return out;
}

CollisionOutcome collision_model_trial(int antennas, double snr, double sigma_est_sq, const PolarCodeSpec& code,
                                       Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    auto draw_payload = [&] {
        Bits p(static_cast<std::size_t>(code.payload_bits));
        for (auto& b : p) b = coin(rng) ? 1 : 0;
        return p;
    };
    const Bits p1 = draw_payload();
    Bits p2 = draw_payload();
    while (p2 == p1) p2 = draw_payload();

    const CVector s1 = qpsk_modulate(polar_encode(code, p1));
    const CVector s2 = qpsk_modulate(polar_encode(code, p2));
    const auto soft = collision_model_symbols(s1, s2, antennas, snr, sigma_est_sq, rng);
    const RVector llr = qpsk_llr(soft.symbols, soft.noise_var);
    const auto dec = scl_decode(code, std::span<const double>(llr.data(), static_cast<std::size_t>(llr.size())));

    const bool got1 = std::find(dec.candidates.begin(), dec.candidates.end(), p1) != dec.candidates.end();
    const bool got2 = std::find(dec.candidates.begin(), dec.candidates.end(), p2) != dec.candidates.end();
    return static_cast<CollisionOutcome>(static_cast<int>(got1) + static_cast<int>(got2));
}

std::vector<CollisionPoint> collision_sweep(int antennas, double snr, const std::vector<double>& sigma_est_db,
                                            int trials, const PolarCodeSpec& code, std::uint64_t seed, Exec exec) {
    std::vector<CollisionPoint> points;
    for (std::size_t p = 0; p < sigma_est_db.size(); ++p) {
        const double sigma_sq = db_to_lin(sigma_est_db[p]);
        std::vector<int> outcome(static_cast<std::size_t>(trials));
        auto body = [&](int t) {
            Rng rng(seed + p * 1'000'003ULL + static_cast<std::uint64_t>(t));
            outcome[static_cast<std::size_t>(t)] = static_cast<int>(collision_model_trial(antennas, snr, sigma_sq, code, rng));
        };
        if (exec == Exec::serial) {
            for (int t = 0; t < trials; ++t) body(t);
        } else {
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t) body(t);
        }
        CollisionPoint pt;
        pt.sigma_est_db = sigma_est_db[p];
        pt.trials = trials;
        for (int o : outcome) {
            if (o == 2) ++pt.both;
            else if (o == 1) ++pt.one;
            else ++pt.none;
        }
        points.push_back(pt);
    }
    return points;
}

}  // namespace ura
