#include "ura/channel.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>

namespace ura {

void SceneParams::validate() const {
    if (active_users < 1) throw ConfigError("active users K_a must be >= 1");
    if (pilot_bits < 1 || pilot_bits > 30) throw ConfigError("pilot bits J must be in [1, 30]");
    if (message_bits <= pilot_bits) throw ConfigError("message bits B must exceed pilot bits J");
    if (antennas < 1) throw ConfigError("antenna count M must be >= 1");
    if (p_pilot < 0 || p_data < 0) throw ConfigError("powers must be non-negative");
    if (n0 < 0) throw ConfigError("N0 must be non-negative");
    if (!lsfc.empty() && static_cast<int>(lsfc.size()) != active_users)
        throw ConfigError("lsfc list must have K_a entries");
    for (double g : lsfc)
        if (!(g > 0)) throw ConfigError("lsfc entries must be positive");
    if (message_bits < 63 && active_users > (std::int64_t{1} << message_bits))
        throw ConfigError("cannot draw K_a distinct messages of B bits");
}

Bits Scene::payload(int user) const {
    const auto& m = messages.at(static_cast<std::size_t>(user));
    return Bits(m.begin() + params.pilot_bits, m.end());
}

Scene scene_from_messages(const SceneParams& params, std::vector<Bits> messages, Rng& rng) {
    params.validate();
    if (static_cast<int>(messages.size()) != params.active_users)
        throw ConfigError("message count differs from K_a");
    Scene s;
    s.params = params;
    s.messages = std::move(messages);
    s.pilot_indices.reserve(s.messages.size());
    for (const auto& m : s.messages) {
        if (static_cast<int>(m.size()) != params.message_bits) throw ShapeError("message length differs from B");
        s.pilot_indices.push_back(static_cast<std::int64_t>(bits_to_uint(m, 0, static_cast<std::size_t>(params.pilot_bits))));
    }
    s.channels = complex_normal_matrix(rng, params.active_users, params.antennas, 1.0);
    s.lsfc = params.lsfc.empty() ? std::vector<double>(static_cast<std::size_t>(params.active_users), 1.0) : params.lsfc;
    return s;
}

Scene draw_scene(const SceneParams& params, Rng& rng) {
    params.validate();
    std::bernoulli_distribution coin(0.5);
    std::set<Bits> seen;
    std::vector<Bits> messages;
    messages.reserve(static_cast<std::size_t>(params.active_users));
    while (static_cast<int>(messages.size()) < params.active_users) {
        Bits m(static_cast<std::size_t>(params.message_bits));
        for (auto& b : m) b = coin(rng) ? 1 : 0;
        if (seen.insert(m).second) messages.push_back(std::move(m));
    }
    return scene_from_messages(params, std::move(messages), rng);
}

CMatrix emit_pilot_signal(const Scene& scene, const PilotBook& book, Rng& rng) {
    if (book.pool_size() != scene.params.pool_size())
        throw ShapeError("pilot book pool size differs from 2^J");
    const auto np = book.pilot_length();
    const auto m = scene.antennas();
    CMatrix y = complex_normal_matrix(rng, np, m, scene.params.n0);
    for (int k = 0; k < scene.active_users(); ++k) {
        const double amp = std::sqrt(scene.params.p_pilot * scene.lsfc[static_cast<std::size_t>(k)]);
        const CVector a = book.column(scene.pilot_indices[static_cast<std::size_t>(k)]);
        y.noalias() += amp * a * scene.channels.row(k);
    }
    return y;
}

CMatrix emit_data_signal(const Scene& scene, const CMatrix& symbols, Rng& rng) {
    if (symbols.rows() != scene.active_users())
        throw ShapeError("data symbols: expected K_a=" + std::to_string(scene.active_users()) + " rows");
    const auto nd = symbols.cols();
    CMatrix y = complex_normal_matrix(rng, nd, scene.antennas(), scene.params.n0);
    for (int k = 0; k < scene.active_users(); ++k) {
        const double amp = std::sqrt(scene.params.p_data * scene.lsfc[static_cast<std::size_t>(k)]);
        y.noalias() += amp * symbols.row(k).transpose() * scene.channels.row(k);
    }
    return y;
}

std::int64_t count_collisions(const std::vector<std::int64_t>& pilot_indices, int order) {
    std::map<std::int64_t, std::int64_t> occupancy;
    for (auto p : pilot_indices) ++occupancy[p];
    std::int64_t total = 0;
    for (const auto& [pilot, count] : occupancy) {
        if (count < order) continue;
        // C(count, order)
        std::int64_t c = 1;
        for (int i = 0; i < order; ++i) c = c * (count - i) / (i + 1);
        total += c;
    }
    return total;
}

}  // namespace ura
