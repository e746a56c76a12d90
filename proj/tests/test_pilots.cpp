#include "oracles.hpp"

#include "ura/pilots.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace ura;

TEST_CASE("full pool gives a permuted DFT with orthogonal columns") {
    const PilotBook book(8, 8, 123);
    std::vector<std::int64_t> rows(book.row_subset().begin(), book.row_subset().end());
    std::sort(rows.begin(), rows.end());
    for (int i = 0; i < 8; ++i) CHECK(rows[static_cast<std::size_t>(i)] == i);
    const CMatrix a = book.dense();
    CHECK((a.adjoint() * a - 8.0 * CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sub-sampled book has distinct rows and unit-modulus columns") {
    const PilotBook book(4096, 1152, 42);
    const std::set<std::int64_t> rows(book.row_subset().begin(), book.row_subset().end());
    CHECK(rows.size() == 1152);
    for (std::int64_t col : {0, 1, 77, 4095}) CHECK(book.column(col).squaredNorm() == doctest::Approx(1152.0).epsilon(1e-12));
}

TEST_CASE("entries follow the DFT kernel") {
    const PilotBook book(16, 8, 7);
    const CMatrix ref = oracle::dense_pilots(book);
    CHECK(oracle::rel_err(book.dense(), ref) < 1e-13);
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const CMatrix x = complex_normal_matrix(rng, 16, 1, 1.0);
        CHECK(oracle::rel_err(book.forward(x), ref * x) <= 1e-9);
    }
}

TEST_CASE("forward selects columns and maps zero to zero") {
    const PilotBook book(32, 12, 5);
    for (std::int64_t k : {0, 3, 31}) {
        CMatrix e = CMatrix::Zero(32, 1);
        e(k, 0) = 1.0;
        const CMatrix out = book.forward(e);
        for (Eigen::Index i = 0; i < 12; ++i)
            CHECK(std::abs(out(i, 0) - oracle::dft_entry(32, book.row_subset()[static_cast<std::size_t>(i)], k)) < 1e-12);
    }
    CHECK(book.forward(CMatrix::Zero(32, 3)).norm() == 0.0);
    CHECK(book.adjoint(CMatrix::Zero(12, 3)).norm() == 0.0);
}

TEST_CASE("fast operators match the dense oracle, serial and parallel bit-identical") {
    Rng rng(9);
    const PilotBook book(32, 12, 11);
    const CMatrix a = oracle::dense_pilots(book);
    const CMatrix x = complex_normal_matrix(rng, 32, 3, 1.0);
    const CMatrix z = complex_normal_matrix(rng, 12, 3, 1.0);
    CHECK(oracle::rel_err(book.forward(x), a * x) <= 1e-9);
    CHECK(oracle::rel_err(book.adjoint(z), a.adjoint() * z) <= 1e-9);
    CHECK(book.forward(x, Exec::serial) == book.forward(x, Exec::parallel));
    CHECK(book.adjoint(z, Exec::serial) == book.adjoint(z, Exec::parallel));
}

TEST_CASE("adjoint identity and full-DFT inversion") {
    Rng rng(3);
    const PilotBook book(64, 20, 2);
    const CMatrix x = complex_normal_matrix(rng, 64, 2, 1.0);
    const CMatrix z = complex_normal_matrix(rng, 20, 2, 1.0);
    const cplx lhs = (book.forward(x).adjoint() * z).trace();
    const cplx rhs = (x.adjoint() * book.adjoint(z)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));

    const PilotBook full(16, 16, 4);
    const CMatrix y = complex_normal_matrix(rng, 16, 2, 1.0);
    CHECK(oracle::rel_err(full.adjoint(full.forward(y)), 16.0 * y) < 1e-12);
}

TEST_CASE("row subset is reproducible from the seed") {
    const PilotBook a(1024, 100, 77), b(1024, 100, 77), c(1024, 100, 78);
    CHECK(std::equal(a.row_subset().begin(), a.row_subset().end(), b.row_subset().begin()));
    CHECK(!std::equal(a.row_subset().begin(), a.row_subset().end(), c.row_subset().begin()));
}

TEST_CASE("sampling without replacement is prefix-consistent") {
    Rng r1(5), r2(5);
    const auto a = sample_without_replacement(100, 10, r1);
    const auto b = sample_without_replacement(100, 30, r2);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    CHECK(std::set<std::int64_t>(b.begin(), b.end()).size() == 30);
}

TEST_CASE("invalid sizes and shapes are rejected") {
    CHECK_THROWS_AS(PilotBook(48, 8, 1), ConfigError);
    CHECK_THROWS_AS(PilotBook(16, 17, 1), ConfigError);
    CHECK_THROWS_AS(PilotBook(16, std::vector<std::int64_t>{1, 1}), ConfigError);
    const PilotBook book(16, 8, 1);
    CHECK_THROWS_AS(book.forward(CMatrix::Zero(8, 1)), ShapeError);
    CHECK_THROWS_AS(book.adjoint(CMatrix::Zero(16, 1)), ShapeError);
}
