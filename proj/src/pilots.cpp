#include "ura/pilots.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace ura {

namespace detail {

// fftw_plan creation is not thread-safe; execution with the new-array
// interface is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlans {
    explicit FftPlans(std::int64_t n) {
        std::vector<fftw_complex> buf(static_cast<std::size_t>(n));
        std::lock_guard lock(fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fwd = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(), FFTW_FORWARD, flags);
        bwd = fftw_plan_dft_1d(static_cast<int>(n), buf.data(), buf.data(), FFTW_BACKWARD, flags);
        if (!fwd || !bwd) throw NumericalError("fftw: failed to create plan of size " + std::to_string(n));
    }
    ~FftPlans() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

}  // namespace detail

namespace {

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_pool(std::int64_t pool_size, std::int64_t pilot_length) {
    if (!is_power_of_two(pool_size))
        throw ConfigError("pilot pool size N=" + std::to_string(pool_size) + " must be a power of two");
    if (pilot_length <= 0 || pilot_length > pool_size)
        throw ConfigError("pilot length n_p=" + std::to_string(pilot_length) + " must satisfy 0 < n_p <= N=" +
                          std::to_string(pool_size));
}

}  // namespace

std::vector<std::int64_t> sample_without_replacement(std::int64_t pool, std::int64_t n, Rng& rng) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(pool));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::int64_t> pick(i, pool - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

PilotBook::PilotBook(std::int64_t pool_size, std::int64_t pilot_length, std::uint64_t seed)
    : pool_size_(pool_size), seed_(seed) {
    check_pool(pool_size, pilot_length);
    Rng rng(seed);
    rows_ = sample_without_replacement(pool_size, pilot_length, rng);
    plans_ = std::make_shared<detail::FftPlans>(pool_size_);
}

PilotBook::PilotBook(std::int64_t pool_size, std::vector<std::int64_t> rows)
    : pool_size_(pool_size), rows_(std::move(rows)) {
    check_pool(pool_size, static_cast<std::int64_t>(rows_.size()));
    validate_rows();
    plans_ = std::make_shared<detail::FftPlans>(pool_size_);
}

void PilotBook::validate_rows() const {
    std::vector<bool> seen(static_cast<std::size_t>(pool_size_), false);
    for (auto r : rows_) {
        if (r < 0 || r >= pool_size_) throw ConfigError("pilot row " + std::to_string(r) + " out of range");
        if (seen[static_cast<std::size_t>(r)]) throw ConfigError("duplicate pilot row " + std::to_string(r));
        seen[static_cast<std::size_t>(r)] = true;
    }
}

cplx PilotBook::entry(std::int64_t row, std::int64_t col) const {
    // reduce the exponent mod N before the trig call to keep full precision
    const std::int64_t k = (rows_.at(static_cast<std::size_t>(row)) * col) % pool_size_;
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(pool_size_);
    return {std::cos(angle), std::sin(angle)};
}

CVector PilotBook::column(std::int64_t col) const {
    CVector a(pilot_length());
    for (std::int64_t i = 0; i < pilot_length(); ++i) a(i) = entry(i, col);
    return a;
}

CMatrix PilotBook::columns(std::span<const std::int64_t> cols) const {
    CMatrix out(pilot_length(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = column(cols[c]);
    return out;
}

CMatrix PilotBook::dense() const {
    CMatrix out(pilot_length(), pool_size_);
    for (std::int64_t j = 0; j < pool_size_; ++j)
        for (std::int64_t i = 0; i < pilot_length(); ++i) out(i, j) = entry(i, j);
    return out;
}

void PilotBook::forward_column(const cplx* in, cplx* out, std::vector<cplx>& scratch) const {
    std::copy(in, in + pool_size_, scratch.begin());
    fftw_execute_dft(plans_->fwd, as_fftw(scratch.data()), as_fftw(scratch.data()));
    for (std::size_t i = 0; i < rows_.size(); ++i) out[i] = scratch[static_cast<std::size_t>(rows_[i])];
}

void PilotBook::adjoint_column(const cplx* in, cplx* out, std::vector<cplx>& scratch) const {
    std::fill(scratch.begin(), scratch.end(), cplx{});
    for (std::size_t i = 0; i < rows_.size(); ++i) scratch[static_cast<std::size_t>(rows_[i])] = in[i];
    fftw_execute_dft(plans_->bwd, as_fftw(scratch.data()), as_fftw(scratch.data()));
    std::copy(scratch.begin(), scratch.end(), out);
}

CMatrix PilotBook::forward(const CMatrix& x, Exec exec) const {
    if (x.rows() != pool_size_)
        throw ShapeError("forward: expected " + std::to_string(pool_size_) + " rows, got " + std::to_string(x.rows()));
    CMatrix out(pilot_length(), x.cols());
    const auto cols = static_cast<std::int64_t>(x.cols());
    if (exec == Exec::serial) {
        std::vector<cplx> scratch(static_cast<std::size_t>(pool_size_));
        for (std::int64_t m = 0; m < cols; ++m) forward_column(&x(0, m), &out(0, m), scratch);
        return out;
    }
#pragma omp parallel
    {
        std::vector<cplx> scratch(static_cast<std::size_t>(pool_size_));
#pragma omp for schedule(static)
        for (std::int64_t m = 0; m < cols; ++m) forward_column(&x(0, m), &out(0, m), scratch);
    }
    return out;
}

CMatrix PilotBook::adjoint(const CMatrix& z, Exec exec) const {
    if (z.rows() != pilot_length())
        throw ShapeError("adjoint: expected " + std::to_string(pilot_length()) + " rows, got " +
                         std::to_string(z.rows()));
    CMatrix out(pool_size_, z.cols());
    const auto cols = static_cast<std::int64_t>(z.cols());
    if (exec == Exec::serial) {
        std::vector<cplx> scratch(static_cast<std::size_t>(pool_size_));
        for (std::int64_t m = 0; m < cols; ++m) adjoint_column(&z(0, m), &out(0, m), scratch);
        return out;
    }
#pragma omp parallel
    {
        std::vector<cplx> scratch(static_cast<std::size_t>(pool_size_));
#pragma omp for schedule(static)
        for (std::int64_t m = 0; m < cols; ++m) adjoint_column(&z(0, m), &out(0, m), scratch);
    }
    return out;
}

}  // namespace ura
