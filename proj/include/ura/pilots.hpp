#pragma once

#include "ura/common.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace ura {

namespace detail {
struct FftPlans;
}

/// Pilot pool made of n_p rows of the N x N DFT matrix W, W(i, j) = exp(-2 pi i * i j / N).
///
/// Column j of the implied matrix A is the pilot sequence of index j; every entry
/// has unit modulus, so each column has squared norm n_p. The row subset is
/// drawn once from the seed (partial Fisher-Yates) and is never stored in
/// configs: (N, n_p, seed) reproduces it.
///
/// forward() and adjoint() apply A and A^H through length-N FFTs, one per
/// antenna column, and agree with the dense entry-wise matrix. The object is
/// immutable after construction and safe to share across threads.
class PilotBook {
public:
    PilotBook(std::int64_t pool_size, std::int64_t pilot_length, std::uint64_t seed);

    /// Uses an explicit row subset; rows must be distinct and in [0, N).
    PilotBook(std::int64_t pool_size, std::vector<std::int64_t> rows);

    std::int64_t pool_size() const { return pool_size_; }
    std::int64_t pilot_length() const { return static_cast<std::int64_t>(rows_.size()); }
    int bits() const { return log2_exact(pool_size_); }
    std::uint64_t seed() const { return seed_; }
    std::span<const std::int64_t> row_subset() const { return rows_; }

    /// A X for X of shape N x M.
    CMatrix forward(const CMatrix& x, Exec exec = Exec::parallel) const;
    /// A^H Z for Z of shape n_p x M.
    CMatrix adjoint(const CMatrix& z, Exec exec = Exec::parallel) const;

    /// Entry (row, col) of A, computed from the DFT kernel directly.
    cplx entry(std::int64_t row, std::int64_t col) const;
    /// Column `col` of A (length n_p).
    CVector column(std::int64_t col) const;
    /// Columns of A listed in `cols`, in order.
    CMatrix columns(std::span<const std::int64_t> cols) const;
    /// Full dense n_p x N matrix. O(n_p N) memory; for small pools and tests.
    CMatrix dense() const;

private:
    void validate_rows() const;
    void forward_column(const cplx* in, cplx* out, std::vector<cplx>& scratch) const;
    void adjoint_column(const cplx* in, cplx* out, std::vector<cplx>& scratch) const;

    std::int64_t pool_size_;
    std::uint64_t seed_ = 0;
    std::vector<std::int64_t> rows_;
    std::shared_ptr<const detail::FftPlans> plans_;
};

/// Uniformly random n-subset of [0, pool) in draw order (partial Fisher-Yates).
std::vector<std::int64_t> sample_without_replacement(std::int64_t pool, std::int64_t n, Rng& rng);

}  // namespace ura
