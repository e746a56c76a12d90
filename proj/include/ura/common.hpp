#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ura {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// One bit per byte, most significant bit first.
using Bits = std::vector<std::uint8_t>;

using Rng = std::mt19937_64;

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path; `parallel` distributes independent work items over OpenMP threads and
/// must produce bit-identical output.
enum class Exec { serial, parallel };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::int64_t v) {
    int k = 0;
    while ((std::int64_t{1} << k) < v) ++k;
    return k;
}

/// Circularly-symmetric complex Gaussian CN(0, variance).
inline cplx complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    double re = nd(rng);
    double im = nd(rng);
    return {re, im};
}

inline CMatrix complex_normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance) {
    CMatrix out(rows, cols);
    // column-major fill keeps the draw order independent of Eigen internals
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = complex_normal(rng, variance);
    return out;
}

/// Integer value of `count` bits starting at `offset`, MSB first.
inline std::uint64_t bits_to_uint(const Bits& bits, std::size_t offset, std::size_t count) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | (bits.at(offset + i) & 1u);
    return v;
}

inline Bits uint_to_bits(std::uint64_t value, std::size_t count) {
    Bits out(count);
    for (std::size_t i = 0; i < count; ++i) out[count - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1u);
    return out;
}

inline std::string bits_to_string(const Bits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace ura
