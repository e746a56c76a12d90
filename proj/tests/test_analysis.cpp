#include "ura/analysis.hpp"
#include "ura/mud.hpp"
#include "ura/pilots.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace ura;

TEST_CASE("Q function and its inverse") {
    CHECK(q_function(0.0) == doctest::Approx(0.5));
    CHECK(q_inverse(0.05) == doctest::Approx(1.6448536269514722).epsilon(1e-10));
    CHECK(q_inverse(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    for (double p : {1e-6, 0.01, 0.3, 0.7, 0.99}) CHECK(q_function(q_inverse(p)) == doctest::Approx(p).epsilon(1e-10));
    CHECK_THROWS_AS(q_inverse(0.0), std::domain_error);
}

TEST_CASE("orthogonal-pilot MSE") {
    CHECK(ortho_mse(1152, 0.0, 1.0, 1.0) == 1.0);
    CHECK(ortho_mse(100, 0.02, 1.0, 2.0) == doctest::Approx(0.5));
    CHECK(ortho_mse(1152, 0.01, 1.0, 1.0) == doctest::Approx(1.0 / 12.52).epsilon(1e-12));
    CHECK(ortho_mse(1152, 0.01, 1.0, 1.0) == doctest::Approx(0.0799).epsilon(1e-3));
}

TEST_CASE("post-MRC SINR") {
    CHECK(sinr_mrc(8, 0.0, 1.0, 0.3, 1.0, 0.0) == doctest::Approx(8 * 0.3));
    CHECK(sinr_mrc(8, 1.0, 1.0, 0.3, 1.0, 0.5) == 0.0);
    const double s = ortho_mse(1152, 0.01, 1.0, 1.0);
    const double v = sinr_mrc(50, s, 1.0, 0.01, 1.0, 99 * 0.01);
    CHECK(v == doctest::Approx(50 * (1 - s) * 0.01 / (1 + s * 0.01 + 0.99)).epsilon(1e-12));
    CHECK(v == doctest::Approx(0.2311).epsilon(1e-3));
}

TEST_CASE("normal approximation values") {
    const double log2e = 1.0 / std::numbers::ln2;
    const double v = 0.5 * 0.75 * log2e * log2e;
    CHECK(dispersion(1.0) == doctest::Approx(v).epsilon(1e-12));
    const auto r = normal_approx_rate(1.0, 2048, 0.05);
    CHECK(r.rate == doctest::Approx(0.5 - std::sqrt(v / 4096.0) * q_inverse(0.05)).epsilon(1e-12));
    CHECK(r.rate == doctest::Approx(0.4773).epsilon(1e-3));
    CHECK(!r.clamped);
    const auto zero = normal_approx_rate(0.0, 2048, 0.05);
    CHECK(zero.rate == 0.0);
    for (double sinr : {0.01, 0.5, 3.0}) CHECK(normal_approx_rate(sinr, 100, 0.5).rate == 0.5 * std::log2(1.0 + sinr));
}

TEST_CASE("required SINR inverts the normal approximation") {
    CHECK(required_sinr(0.5, 2048, 0.5) == doctest::Approx(1.0).epsilon(1e-10));
    const double rate = 84.0 / 4096.0;
    const double s = required_sinr(rate, 2048, 0.04);
    CHECK(normal_approx_rate(s, 2048, 0.04).rate == doctest::Approx(rate).epsilon(1e-10));
    CHECK(normal_approx_rate(s * 0.999, 2048, 0.04).rate < rate);
    CHECK_THROWS_AS(required_sinr(30.0, 2048, 0.05), std::domain_error);
}

TEST_CASE("expected collisions") {
    CHECK(expected_collisions(2, 4.0, 2) == doctest::Approx(0.25));
    CHECK(expected_collisions(1000, 65536.0, 2) == doctest::Approx(499500.0 / 65536.0).epsilon(1e-9));
    CHECK(expected_collisions(100, 1024.0, 3) == doctest::Approx(161700.0 / (1024.0 * 1024.0)).epsilon(1e-9));
    CHECK(2.0 * expected_collisions(1000, 65536.0, 2) / 1000.0 == doctest::Approx(0.0152).epsilon(0.01));
}

TEST_CASE("Eb/N0 bookkeeping") {
    // equal powers: Eb/N0 = P / (R N0) with R = B / n
    const double e = ebn0_linear(1152, 2048, 100, 0.01, 0.01, 1.0);
    CHECK(e == doctest::Approx(0.01 / (100.0 / 3200.0)));
}

TEST_CASE("lmmse MSE model agrees with direct error covariances") {
    const LmmseMseModel model(8, 64, 20, 6, 5);
    for (const auto& ev : model.eigenvalues()) {
        CHECK(ev.size() == 20);
        CHECK(ev.sum() == doctest::Approx(20.0 * 64.0).epsilon(1e-10));  // trace of A_I^H A_I
        CHECK(ev.minCoeff() >= -1e-9);
    }
    Rng rng(77);
    double direct = 0.0;
    const int draws = 60;
    for (int d = 0; d < draws; ++d) {
        const PilotBook book(256, 64, rng());
        auto sup = sample_without_replacement(256, 20, rng);
        std::sort(sup.begin(), sup.end());
        const std::vector<double> gamma(20, 0.05);
        direct += error_covariance(book, sup, gamma, 1.0).diagonal().real().mean();
    }
    direct /= draws;
    CHECK(model.mean_mse(0.05, 1.0) == doctest::Approx(direct).epsilon(0.03));
    CHECK(model.mean_mse(0.05, 1.0) >= ortho_mse(64, 0.05, 1.0, 1.0));
    CHECK(model.mean_mse(0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("required Eb/N0 meets its target and orders the models") {
    EbN0Query q;
    q.active_users = 100;
    q.antennas = 50;
    q.pilot_draws = 3;
    const auto ortho = required_ebn0(q);
    REQUIRE(ortho.feasible);
    CHECK(ortho.sinr == doctest::Approx(ortho.target_sinr).epsilon(1e-6));
    CHECK(ortho.rate_target == doctest::Approx(84.0 / 4096.0));
    CHECK(ortho.effective_error_prob == doctest::Approx(0.05 - 99.0 / 65536.0).epsilon(1e-12));
    CHECK(ortho.ebn0_db == doctest::Approx(10.0 * std::log10(ortho.power * 3200.0 / 100.0)).epsilon(1e-9));
    q.mse_model = MseModel::lmmse;
    const auto lmmse = required_ebn0(q);
    REQUIRE(lmmse.feasible);
    CHECK(lmmse.ebn0_db >= ortho.ebn0_db);
    CHECK(lmmse.mse >= ortho_mse(1152, lmmse.power, 1.0, 1.0));
}

TEST_CASE("required Eb/N0 monotonicity on a small grid") {
    EbN0Query q;
    q.pilot_draws = 2;
    double prev_k = -1e9;
    for (int k : {50, 150, 300}) {
        q.active_users = k;
        double prev_m = 1e9;
        for (int m : {25, 50, 100}) {
            q.antennas = m;
            const double e = required_ebn0(q).ebn0_db;
            CHECK(e <= prev_m);
            prev_m = e;
        }
        q.antennas = 50;
        const double e = required_ebn0(q).ebn0_db;
        CHECK(e >= prev_k);
        prev_k = e;
    }
}

TEST_CASE("interference-limited and collision-dominated points") {
    EbN0Query q;
    q.active_users = 1000;
    q.antennas = 25;  // SINR ceiling about 25 / 999, below the target
    const auto r = required_ebn0(q);
    CHECK(!r.feasible);
    CHECK(std::isinf(r.ebn0_db));
    q.antennas = 50;
    q.pilot_bits = 8;
    q.active_users = 100;  // 2 E{C_2} / K_a = 99 / 256 > 0.05
    q.pilot_length = 256;
    CHECK_THROWS_AS(required_ebn0(q), std::domain_error);
}

TEST_CASE("mse model names") {
    CHECK(parse_mse_model("lmmse") == MseModel::lmmse);
    CHECK(to_string(MseModel::ortho) == "ortho");
    CHECK_THROWS_AS(parse_mse_model("x"), ConfigError);
}
