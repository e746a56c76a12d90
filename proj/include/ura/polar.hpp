#pragma once

#include "ura/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ura {

/// Generator polynomial (without the leading term) for a CRC of `width` bits.
/// Supported widths: 0 (no CRC), 4, 8, 11, 16 (CCITT 0x1021), 24.
std::uint32_t crc_polynomial(int width);

/// Zero-initialized, non-reflected CRC remainder of `bits`, MSB first.
Bits crc_remainder(std::span<const std::uint8_t> bits, int width);

/// CRC-aided polar code. Information positions carry payload followed by CRC;
/// frozen positions are 0; codeword x = u F^{(x)n} over GF(2), natural order.
struct PolarCodeSpec {
    int block_length = 0;
    int payload_bits = 0;
    int crc_bits = 16;
    int list_size = 32;
    /// Bhattacharyya parameter of the construction channel.
    double design_z = 0.5;
    std::vector<std::uint8_t> frozen;    // mask, size block_length
    std::vector<int> frozen_set;         // sorted
    std::vector<int> info_set;           // sorted, payload_bits + crc_bits entries

    int info_bits() const { return payload_bits + crc_bits; }
    int stages() const { return log2_exact(block_length); }
};

/// Log-domain Bhattacharyya parameters of the synthetic channels for
/// Z(W-) = 2Z - Z^2, Z(W+) = Z^2, index MSB = first split.
std::vector<double> bhattacharyya_log(int block_length, double design_z);

/// Freezes the block_length - payload - crc positions with the largest
/// Bhattacharyya parameter (ties: lower index frozen first).
PolarCodeSpec construct_polar(int block_length, int payload_bits, int crc_bits, double design_z, int list_size = 32);

/// Construction with Z0 = exp(-design_snr), the BI-AWGN Bhattacharyya value
/// at the given per-real-dimension SNR.
PolarCodeSpec construct_polar_snr(int block_length, int payload_bits, int crc_bits, double design_snr,
                                  int list_size = 32);

/// In-place x = u F^{(x)n}.
void polar_transform(std::span<std::uint8_t> u);

Bits polar_encode(const PolarCodeSpec& spec, const Bits& payload);

/// Payload followed by its CRC: the bits carried on the information positions, in order.
Bits polar_info_vector(const PolarCodeSpec& spec, const Bits& payload);

struct DecodeOutput {
    std::vector<Bits> candidates;  // CRC-valid payloads, best metric first
    std::vector<double> metrics;
    /// Surviving paths that failed the CRC, best metric first.
    std::vector<Bits> rejected;
    std::vector<double> rejected_metrics;
};

enum class CheckNode { exact, min_sum };

struct SclOptions {
    CheckNode check_node = CheckNode::exact;
    /// Input LLR magnitude cap.
    double llr_clamp = 1e6;
};

/// Successive-cancellation list decoding with LLR-based path metrics.
/// Returns every surviving path that passes the CRC.
DecodeOutput scl_decode(const PolarCodeSpec& spec, std::span<const double> llr, const SclOptions& opts = {});

/// Checks the CRC of an information vector (payload followed by remainder).
bool crc_check(const PolarCodeSpec& spec, std::span<const std::uint8_t> info);

}  // namespace ura
