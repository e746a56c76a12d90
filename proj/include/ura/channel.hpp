#pragma once

#include "ura/common.hpp"
#include "ura/pilots.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ura {

/// Parameters needed to draw one random-access realization.
struct SceneParams {
    int active_users = 1;      // K_a
    int message_bits = 100;    // B
    int pilot_bits = 16;       // J, pool size N = 2^J
    int antennas = 1;          // M
    double p_pilot = 1.0;      // linear, per symbol
    double p_data = 1.0;
    double n0 = 1.0;
    /// Per-user LSFCs; empty means g_k = 1 for every user.
    std::vector<double> lsfc;

    std::int64_t pool_size() const { return std::int64_t{1} << pilot_bits; }
    void validate() const;
};

/// One realization: active users, their messages, pilot choices and channels.
struct Scene {
    SceneParams params;
    std::vector<Bits> messages;              // K_a x B
    std::vector<std::int64_t> pilot_indices; // value of the first J message bits
    CMatrix channels;                        // K_a x M, rows h_k ~ CN(0, I_M)
    std::vector<double> lsfc;                // g_k > 0

    int active_users() const { return static_cast<int>(messages.size()); }
    int antennas() const { return static_cast<int>(channels.cols()); }
    /// Payload bits after the pilot prefix.
    Bits payload(int user) const;
};

struct ReceivedSignals {
    CMatrix pilot;  // n_p x M
    CMatrix data;   // n_d x M
};

/// Draws K_a distinct uniform messages, derives pilot indices from their
/// J-bit prefixes (collisions allowed), Rayleigh channels and LSFCs.
Scene draw_scene(const SceneParams& params, Rng& rng);

/// Builds a scene from fixed messages; channels are still drawn from `rng`.
Scene scene_from_messages(const SceneParams& params, std::vector<Bits> messages, Rng& rng);

/// Y_p = sum_k sqrt(P_pilot g_k) a_{i_k} h_k^T + Z_p, Z_p iid CN(0, N0).
CMatrix emit_pilot_signal(const Scene& scene, const PilotBook& book, Rng& rng);

/// Y_d = sum_k sqrt(P_data g_k) s_k h_k^T + Z_d. `symbols` is K_a x n_d.
CMatrix emit_data_signal(const Scene& scene, const CMatrix& symbols, Rng& rng);

/// Number of k-subsets of users sharing one pilot, summed over pilots. Its
/// expectation is C(K_a, k) / N^(k-1).
std::int64_t count_collisions(const std::vector<std::int64_t>& pilot_indices, int order);

}  // namespace ura
