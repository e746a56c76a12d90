#pragma once

// Straightforward reference computations used to check the library.

#include "ura/common.hpp"
#include "ura/pilots.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

using ura::CMatrix;
using ura::CVector;
using ura::cplx;

// DFT kernel evaluated in long double from the row index.
inline cplx dft_entry(std::int64_t n, std::int64_t row, std::int64_t col) {
    const long double phase = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(row) *
                              static_cast<long double>(col) / static_cast<long double>(n);
    return {static_cast<double>(std::cos(phase)), static_cast<double>(std::sin(phase))};
}

inline CMatrix dense_pilots(const ura::PilotBook& book) {
    const auto rows = book.row_subset();
    CMatrix a(static_cast<Eigen::Index>(rows.size()), book.pool_size());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = dft_entry(book.pool_size(), rows[static_cast<std::size_t>(i)], j);
    return a;
}

inline double rel_err(const CMatrix& got, const CMatrix& want) {
    const double scale = want.norm();
    return scale > 0.0 ? (got - want).norm() / scale : got.norm();
}

// Conditional mean of vec(H) given vec(Y) for Y = A_I diag(sqrt(gamma)) H + Z
// with H iid CN(0, 1) and Z iid CN(0, n0), from the joint covariance.
struct JointGaussian {
    CMatrix mean;      // |I| x M
    CMatrix error_cov; // |I| x |I|, per antenna
};

inline JointGaussian joint_gaussian_mmse(const CMatrix& y, const CMatrix& a_full, std::span<const std::int64_t> support,
                                         std::span<const double> gamma, double n0) {
    const auto np = y.rows();
    const auto m = y.cols();
    const auto k = static_cast<Eigen::Index>(support.size());
    const Eigen::Index dh = k * m, dy = np * m;
    // vec stacks columns: index (row, antenna) -> row + antenna * rows
    CMatrix c_hy = CMatrix::Zero(dh, dy);
    CMatrix c_yy = CMatrix::Zero(dy, dy);
    for (Eigen::Index ant = 0; ant < m; ++ant) {
        for (Eigen::Index u = 0; u < k; ++u)
            for (Eigen::Index i = 0; i < np; ++i)
                c_hy(u + ant * k, i + ant * np) = std::sqrt(gamma[static_cast<std::size_t>(u)]) *
                                                  std::conj(a_full(i, support[static_cast<std::size_t>(u)]));
        for (Eigen::Index i = 0; i < np; ++i)
            for (Eigen::Index j = 0; j < np; ++j) {
                cplx acc = i == j ? cplx(n0, 0.0) : cplx(0.0, 0.0);
                for (Eigen::Index u = 0; u < k; ++u) {
                    const auto col = support[static_cast<std::size_t>(u)];
                    acc += gamma[static_cast<std::size_t>(u)] * a_full(i, col) * std::conj(a_full(j, col));
                }
                c_yy(i + ant * np, j + ant * np) = acc;
            }
    }
    Eigen::Map<const CVector> vy(y.data(), dy);
    const Eigen::FullPivLU<CMatrix> lu(c_yy);
    const CVector vh = c_hy * lu.solve(CVector(vy));
    JointGaussian out;
    out.mean = Eigen::Map<const CMatrix>(vh.data(), k, m);
    const CMatrix full = CMatrix::Identity(dh, dh) - c_hy * lu.solve(CMatrix(c_hy.adjoint()));
    out.error_cov = full.topLeftCorner(k, k);
    return out;
}

// Recursive successive-cancellation decoding of x = u F^{(x)n}, natural order,
// with the exact boxplus check node. Returns u.
inline double boxplus(double a, double b) {
    const double t = std::tanh(a / 2.0) * std::tanh(b / 2.0);
    const double c = std::clamp(t, -1.0 + 1e-15, 1.0 - 1e-15);
    return 2.0 * std::atanh(c);
}

inline void sc_recurse(std::span<const double> llr, std::span<const std::uint8_t> frozen, std::vector<std::uint8_t>& u,
                       std::vector<std::uint8_t>& x) {
    const std::size_t n = llr.size();
    if (n == 1) {
        const std::uint8_t bit = frozen[0] ? 0 : (llr[0] < 0.0 ? 1 : 0);
        u.push_back(bit);
        x.assign(1, bit);
        return;
    }
    const std::size_t h = n / 2;
    std::vector<double> l1(h), l2(h);
    for (std::size_t i = 0; i < h; ++i) l1[i] = boxplus(llr[i], llr[h + i]);
    std::vector<std::uint8_t> v1, v2;
    sc_recurse(l1, frozen.subspan(0, h), u, v1);
    for (std::size_t i = 0; i < h; ++i) l2[i] = llr[h + i] + (v1[i] ? -llr[i] : llr[i]);
    sc_recurse(l2, frozen.subspan(h, h), u, v2);
    x.resize(n);
    for (std::size_t i = 0; i < h; ++i) {
        x[i] = v1[i] ^ v2[i];
        x[h + i] = v2[i];
    }
}

inline std::vector<std::uint8_t> sc_decode(std::span<const double> llr, std::span<const std::uint8_t> frozen) {
    std::vector<std::uint8_t> u, x;
    sc_recurse(llr, frozen, u, x);
    return u;
}

// x = u F^{(x)n} by the definition of the Kronecker power: F^{(x)n}(i, j) = 1
// iff the bits of j are a subset of the bits of i.
inline std::vector<std::uint8_t> kron_encode(const std::vector<std::uint8_t>& u) {
    const std::size_t n = u.size();
    std::vector<std::uint8_t> x(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (u[i])
            for (std::size_t j = 0; j < n; ++j)
                if ((i & j) == j) x[j] ^= 1;
    return x;
}

// Bitwise long division CRC, zero init, MSB first.
inline std::vector<std::uint8_t> crc_long_division(const std::vector<std::uint8_t>& msg, std::uint32_t poly, int width) {
    std::vector<std::uint8_t> reg(msg);
    reg.resize(msg.size() + static_cast<std::size_t>(width), 0);
    std::vector<std::uint8_t> g(static_cast<std::size_t>(width) + 1);
    g[0] = 1;
    for (int i = 0; i < width; ++i) g[static_cast<std::size_t>(i) + 1] = (poly >> (width - 1 - i)) & 1u;
    for (std::size_t i = 0; i < msg.size(); ++i)
        if (reg[i])
            for (std::size_t j = 0; j < g.size(); ++j) reg[i + j] ^= g[j];
    return {reg.end() - width, reg.end()};
}

}  // namespace oracle
