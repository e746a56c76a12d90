#include "ura/polar.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ura {

std::uint32_t crc_polynomial(int width) {
    switch (width) {
        case 0: return 0;
        case 4: return 0x3;
        case 8: return 0x07;
        case 11: return 0x385;
        case 16: return 0x1021;
        case 24: return 0x864CFB;
        default: throw ConfigError("unsupported CRC width " + std::to_string(width));
    }
}

Bits crc_remainder(std::span<const std::uint8_t> bits, int width) {
    if (width == 0) return {};
    const std::uint32_t poly = crc_polynomial(width);
    const std::uint32_t mask = (width == 32) ? 0xFFFFFFFFu : ((1u << width) - 1u);
    std::uint32_t reg = 0;
    for (auto b : bits) {
        const std::uint32_t feedback = ((reg >> (width - 1)) & 1u) ^ (b & 1u);
        reg = (reg << 1) & mask;
        if (feedback) reg ^= poly;
    }
    return uint_to_bits(reg, static_cast<std::size_t>(width));
}

bool crc_check(const PolarCodeSpec& spec, std::span<const std::uint8_t> info) {
    const auto payload = info.first(static_cast<std::size_t>(spec.payload_bits));
    const auto rem = crc_remainder(payload, spec.crc_bits);
    return std::equal(rem.begin(), rem.end(), info.begin() + spec.payload_bits);
}

std::vector<double> bhattacharyya_log(int block_length, double design_z) {
    if (!is_power_of_two(block_length)) throw ConfigError("polar: block length must be a power of two");
    if (!(design_z > 0.0 && design_z < 1.0)) throw ConfigError("polar: design Bhattacharyya parameter must be in (0, 1)");
    std::vector<double> lz{std::log(design_z)};
    while (static_cast<int>(lz.size()) < block_length) {
        std::vector<double> next(lz.size() * 2);
        for (std::size_t j = 0; j < lz.size(); ++j) {
            // log(2Z - Z^2) = log Z + log(2 - Z)
            next[2 * j] = lz[j] + std::log(2.0 - std::exp(lz[j]));
            next[2 * j + 1] = 2.0 * lz[j];
        }
        lz = std::move(next);
    }
    return lz;
}

PolarCodeSpec construct_polar(int block_length, int payload_bits, int crc_bits, double design_z, int list_size) {
    if (payload_bits < 1) throw ConfigError("polar: payload must have at least one bit");
    if (payload_bits + crc_bits >= block_length)
        throw ConfigError("polar: payload + crc (" + std::to_string(payload_bits + crc_bits) +
                          ") must be below block length " + std::to_string(block_length));
    if (list_size < 1) throw ConfigError("polar: list size must be >= 1");
    crc_polynomial(crc_bits);
    const auto lz = bhattacharyya_log(block_length, design_z);

    std::vector<int> order(static_cast<std::size_t>(block_length));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return lz[static_cast<std::size_t>(a)] > lz[static_cast<std::size_t>(b)];
    });

    PolarCodeSpec spec;
    spec.block_length = block_length;
    spec.payload_bits = payload_bits;
    spec.crc_bits = crc_bits;
    spec.list_size = list_size;
    spec.design_z = design_z;
    spec.frozen.assign(static_cast<std::size_t>(block_length), 0);
    const int n_frozen = block_length - payload_bits - crc_bits;
    for (int i = 0; i < n_frozen; ++i) spec.frozen[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    for (int i = 0; i < block_length; ++i)
        (spec.frozen[static_cast<std::size_t>(i)] ? spec.frozen_set : spec.info_set).push_back(i);
    return spec;
}

PolarCodeSpec construct_polar_snr(int block_length, int payload_bits, int crc_bits, double design_snr,
                                  int list_size) {
    if (!(design_snr > 0.0)) throw ConfigError("polar: design SNR must be positive");
    return construct_polar(block_length, payload_bits, crc_bits, std::exp(-design_snr), list_size);
}

void polar_transform(std::span<std::uint8_t> u) {
    const std::size_t n = u.size();
    for (std::size_t half = 1; half < n; half <<= 1)
        for (std::size_t base = 0; base < n; base += 2 * half)
            for (std::size_t j = base; j < base + half; ++j) u[j] ^= u[j + half];
}

Bits polar_info_vector(const PolarCodeSpec& spec, const Bits& payload) {
    if (static_cast<int>(payload.size()) != spec.payload_bits)
        throw ShapeError("polar: payload has " + std::to_string(payload.size()) + " bits, expected " +
                         std::to_string(spec.payload_bits));
    Bits info = payload;
    const auto rem = crc_remainder(payload, spec.crc_bits);
    info.insert(info.end(), rem.begin(), rem.end());
    return info;
}

Bits polar_encode(const PolarCodeSpec& spec, const Bits& payload) {
    const Bits info = polar_info_vector(spec, payload);
    Bits u(static_cast<std::size_t>(spec.block_length), 0);
    for (std::size_t i = 0; i < info.size(); ++i) u[static_cast<std::size_t>(spec.info_set[i])] = info[i];
    polar_transform(u);
    return u;
}

namespace {

// ln(1 + e^x) without overflow
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double check_exact(double a, double b) {
    const double s = ((a < 0) != (b < 0)) ? -1.0 : 1.0;
    return s * std::min(std::abs(a), std::abs(b)) + std::log1p(std::exp(-std::abs(a + b))) -
           std::log1p(std::exp(-std::abs(a - b)));
}

double check_min_sum(double a, double b) {
    const double s = ((a < 0) != (b < 0)) ? -1.0 : 1.0;
    return s * std::min(std::abs(a), std::abs(b));
}

// Per-path decoder memory. Layer d (1..n) of a tree holds N >> d values at
// offset N - 2 (N >> d); layer 0 LLRs are the shared channel input.
struct Path {
    std::vector<double> alpha;
    std::vector<std::uint8_t> beta_left;
    std::vector<std::uint8_t> beta_right;
    std::vector<std::uint8_t> u;
    double metric = 0.0;
};

class SclDecoder {
public:
    SclDecoder(const PolarCodeSpec& spec, std::span<const double> llr, const SclOptions& opts)
        : spec_(spec), n_(spec.block_length), stages_(spec.stages()),
          check_(opts.check_node == CheckNode::exact ? check_exact : check_min_sum) {
        channel_.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i)
            channel_[static_cast<std::size_t>(i)] = std::clamp(llr[static_cast<std::size_t>(i)], -opts.llr_clamp, opts.llr_clamp);
        pool_.resize(static_cast<std::size_t>(spec.list_size));
        for (auto& p : pool_) {
            p.alpha.assign(static_cast<std::size_t>(std::max(n_ - 1, 1)), 0.0);
            p.beta_left.assign(static_cast<std::size_t>(2 * n_), 0);
            p.beta_right.assign(static_cast<std::size_t>(2 * n_), 0);
            p.u.assign(static_cast<std::size_t>(n_), 0);
        }
        for (int s = spec.list_size - 1; s >= 1; --s) free_.push_back(s);
        active_.push_back(0);
    }

    DecodeOutput run() {
        for (int i = 0; i < n_; ++i) {
            for (int p : active_) update_llrs(pool_[static_cast<std::size_t>(p)], i);
            if (spec_.frozen[static_cast<std::size_t>(i)])
                decide_frozen(i);
            else
                decide_info(i);
            for (int p : active_) update_bits(pool_[static_cast<std::size_t>(p)], i);
        }
        return collect();
    }

private:
    std::size_t offset(int layer) const { return static_cast<std::size_t>(n_ - 2 * (n_ >> layer)); }
    const double* alpha_in(const Path& p, int layer) const {
        return layer == 0 ? channel_.data() : p.alpha.data() + offset(layer);
    }
    // betas keep a layer-0 slot so the propagation loop needs no special case
    std::size_t beta_offset(int layer) const { return static_cast<std::size_t>(2 * n_ - 2 * (n_ >> layer)); }

    void update_llrs(Path& p, int leaf) {
        if (stages_ == 0) return;
        int layer;
        if (leaf == 0) {
            layer = 0;
        } else {
            const int tz = std::countr_zero(static_cast<unsigned>(leaf));
            layer = stages_ - 1 - tz;
            // right child: g with the left sibling's partial sums
            const int len = n_ >> (layer + 1);
            const double* a = alpha_in(p, layer);
            const std::uint8_t* beta = p.beta_left.data() + beta_offset(layer + 1);
            double* out = p.alpha.data() + offset(layer + 1);
            for (int j = 0; j < len; ++j) out[j] = a[j + len] + (beta[j] ? -a[j] : a[j]);
            ++layer;
        }
        for (; layer < stages_; ++layer) {
            const int len = n_ >> (layer + 1);
            const double* a = alpha_in(p, layer);
            double* out = p.alpha.data() + offset(layer + 1);
            for (int j = 0; j < len; ++j) out[j] = check_(a[j], a[j + len]);
        }
    }

    double leaf_llr(const Path& p) const { return stages_ == 0 ? channel_[0] : p.alpha[static_cast<std::size_t>(n_ - 2)]; }

    void update_bits(Path& p, int leaf) {
        const std::uint8_t bit = p.u[static_cast<std::size_t>(leaf)];
        int layer = stages_;
        int node = leaf;
        ((node & 1) ? p.beta_right : p.beta_left)[beta_offset(layer)] = bit;
        while (layer > 0 && (node & 1)) {
            const int len = n_ >> layer;
            const std::uint8_t* l = p.beta_left.data() + beta_offset(layer);
            const std::uint8_t* r = p.beta_right.data() + beta_offset(layer);
            const int parent = node >> 1;
            std::uint8_t* out = ((parent & 1) ? p.beta_right.data() : p.beta_left.data()) + beta_offset(layer - 1);
            for (int j = 0; j < len; ++j) {
                out[j] = l[j] ^ r[j];
                out[j + len] = r[j];
            }
            node = parent;
            --layer;
        }
    }

    void decide_frozen(int leaf) {
        for (int p : active_) {
            Path& path = pool_[static_cast<std::size_t>(p)];
            path.u[static_cast<std::size_t>(leaf)] = 0;
            path.metric += softplus(-leaf_llr(path));
        }
    }

    struct Fork {
        double metric;
        int rank;  // position in active_ list
        std::uint8_t bit;
    };

    void decide_info(int leaf) {
        std::vector<Fork> forks;
        forks.reserve(2 * active_.size());
        for (std::size_t r = 0; r < active_.size(); ++r) {
            const Path& path = pool_[static_cast<std::size_t>(active_[r])];
            const double llr = leaf_llr(path);
            forks.push_back({path.metric + softplus(-llr), static_cast<int>(r), 0});
            forks.push_back({path.metric + softplus(llr), static_cast<int>(r), 1});
        }
        const auto keep = std::min(forks.size(), static_cast<std::size_t>(spec_.list_size));
        std::stable_sort(forks.begin(), forks.end(), [](const Fork& a, const Fork& b) {
            if (a.metric != b.metric) return a.metric < b.metric;
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.bit < b.bit;
        });
        forks.resize(keep);

        std::vector<std::array<const Fork*, 2>> chosen(active_.size(), {nullptr, nullptr});
        for (const auto& f : forks) chosen[static_cast<std::size_t>(f.rank)][f.bit] = &f;

        // release slots of paths with no surviving fork first
        for (std::size_t r = 0; r < active_.size(); ++r)
            if (!chosen[r][0] && !chosen[r][1]) free_.push_back(active_[r]);

        std::vector<int> next;
        next.reserve(keep);
        for (std::size_t r = 0; r < active_.size(); ++r) {
            const int slot = active_[r];
            const Fork* f0 = chosen[r][0];
            const Fork* f1 = chosen[r][1];
            if (!f0 && !f1) continue;
            if (f0 && f1) {
                const int clone = free_.back();
                free_.pop_back();
                pool_[static_cast<std::size_t>(clone)] = pool_[static_cast<std::size_t>(slot)];
                assign(slot, leaf, *f0);
                assign(clone, leaf, *f1);
                next.push_back(slot);
                next.push_back(clone);
            } else {
                assign(slot, leaf, f0 ? *f0 : *f1);
                next.push_back(slot);
            }
        }
        active_ = std::move(next);
    }

    void assign(int slot, int leaf, const Fork& f) {
        Path& p = pool_[static_cast<std::size_t>(slot)];
        p.u[static_cast<std::size_t>(leaf)] = f.bit;
        p.metric = f.metric;
    }

    DecodeOutput collect() const {
        std::vector<std::size_t> order(active_.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pool_[static_cast<std::size_t>(active_[a])].metric < pool_[static_cast<std::size_t>(active_[b])].metric;
        });
        DecodeOutput out;
        Bits info(spec_.info_set.size());
        for (auto r : order) {
            const Path& p = pool_[static_cast<std::size_t>(active_[r])];
            for (std::size_t k = 0; k < info.size(); ++k) info[k] = p.u[static_cast<std::size_t>(spec_.info_set[k])];
            if (!crc_check(spec_, info)) {
                out.rejected.emplace_back(info.begin(), info.begin() + spec_.payload_bits);
                out.rejected_metrics.push_back(p.metric);
                continue;
            }
            out.candidates.emplace_back(info.begin(), info.begin() + spec_.payload_bits);
            out.metrics.push_back(p.metric);
        }
        return out;
    }

    const PolarCodeSpec& spec_;
    int n_;
    int stages_;
    double (*check_)(double, double);
    std::vector<double> channel_;
    std::vector<Path> pool_;
    std::vector<int> free_;
    std::vector<int> active_;
};

}  // namespace

DecodeOutput scl_decode(const PolarCodeSpec& spec, std::span<const double> llr, const SclOptions& opts) {
    if (static_cast<int>(llr.size()) != spec.block_length)
        throw ShapeError("scl: expected " + std::to_string(spec.block_length) + " LLRs, got " + std::to_string(llr.size()));
    for (double v : llr)
        if (std::isnan(v)) throw ShapeError("scl: NaN LLR");
    SclDecoder dec(spec, llr, opts);
    return dec.run();
}

}  // namespace ura
