#include "ura/selftest.hpp"

#include "ura/amp.hpp"
#include "ura/analysis.hpp"
#include "ura/channel.hpp"
#include "ura/mud.hpp"
#include "ura/pilots.hpp"
#include "ura/polar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

namespace ura {

namespace {

struct Check {
    std::string name;
    std::function<bool()> body;
};

bool fft_matches_dense() {
    for (int bits : {3, 4, 5, 6}) {
        const std::int64_t n = std::int64_t{1} << bits;
        const PilotBook book(n, n / 2, 7 + bits);
        const CMatrix a = book.dense();
        Rng rng(11);
        const CMatrix x = complex_normal_matrix(rng, n, 3, 1.0);
        const CMatrix z = complex_normal_matrix(rng, n / 2, 3, 1.0);
        if ((book.forward(x, Exec::serial) - a * x).cwiseAbs().maxCoeff() > 1e-9) return false;
        if ((book.adjoint(z, Exec::serial) - a.adjoint() * z).cwiseAbs().maxCoeff() > 1e-9) return false;
        if ((book.forward(x, Exec::parallel) - book.forward(x, Exec::serial)).cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
}

bool lmmse_forms_agree() {
    const PilotBook book(64, 24, 3);
    Rng rng(5);
    const std::vector<std::int64_t> support{1, 9, 30, 41};
    const std::vector<double> gamma{1.0, 0.5, 2.0, 1.5};
    const CMatrix y = complex_normal_matrix(rng, 24, 4, 1.0);
    const auto r = lmmse_estimate(y, book, support, gamma, 0.3, LmmseForm::reduced);
    const auto f = lmmse_estimate(y, book, support, gamma, 0.3, LmmseForm::full);
    if ((r.h_hat - f.h_hat).cwiseAbs().maxCoeff() > 1e-10) return false;
    for (std::size_t k = 0; k < support.size(); ++k)
        if (r.mse[k] < ortho_mse(24, gamma[k], 1.0, 0.3) - 1e-12) return false;
    return true;
}

bool polar_roundtrip() {
    const auto code = construct_polar_snr(256, 40, 16, db_to_lin(0.0), 8);
    Rng rng(3);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 5; ++t) {
        Bits p(40);
        for (auto& b : p) b = coin(rng) ? 1 : 0;
        const Bits x = polar_encode(code, p);
        std::vector<double> llr(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) llr[i] = x[i] ? -8.0 : 8.0;
        const auto out = scl_decode(code, llr);
        if (out.candidates.empty() || out.candidates.front() != p) return false;
    }
    return true;
}

bool amp_recovers_sparse_support() {
    const PilotBook book(256, 96, 9);
    SceneParams sp;
    sp.active_users = 6;
    sp.message_bits = 20;
    sp.pilot_bits = 8;
    sp.antennas = 8;
    sp.p_pilot = sp.p_data = 1.0;
    Rng rng(21);
    const Scene scene = draw_scene(sp, rng);
    const CMatrix y = emit_pilot_signal(scene, book, rng);
    AmpConfig cfg;
    cfg.sparsity = 6.0 / 256.0;
    cfg.prior_power = 1.0;
    std::vector<std::int64_t> truth(scene.pilot_indices.begin(), scene.pilot_indices.end());
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
    cfg.known_active = static_cast<int>(truth.size());
    return run_mmv_amp(y, book, cfg).support == truth;
}

}  // namespace

int run_selftest(std::ostream& os) {
    const std::vector<Check> checks{
        {"fft operators match dense products", fft_matches_dense},
        {"expected two-user collisions (1000 users, 2^16 pilots)",
         [] { return std::abs(expected_collisions(1000, 65536.0, 2) - 7.6218) < 1e-3; }},
        {"normal approximation inverts",
         [] {
             const double s = required_sinr(0.3, 2048, 0.05);
             return std::abs(normal_approx_rate(s, 2048, 0.05).rate - 0.3) < 1e-8;
         }},
        {"lmmse reduced and full forms agree", lmmse_forms_agree},
        {"crc-aided polar noiseless roundtrip", polar_roundtrip},
        {"amp recovers a sparse support", amp_recovers_sparse_support},
    };
    int failures = 0;
    for (const auto& c : checks) {
        bool ok = false;
        try {
            ok = c.body();
        } catch (const std::exception& e) {
            os << "  error: " << e.what() << '\n';
        }
        failures += !ok;
        os << (ok ? "PASS " : "FAIL ") << c.name << '\n';
    }
    return failures;
}

}  // namespace ura
