#include "doctest.h"

#include <random>

#include "ffmm/factor.hpp"
#include "test_util.hpp"

using namespace ffmm;
using testutil::mm_reference;
using testutil::random_matrix;

namespace {

// Random upper/lower triangular with invertible diagonal.
ElemMat random_upper(std::size_t n, const PrimeField& F,
                     std::mt19937_64& rng) {
    ElemMat U = random_matrix(n, n, F, rng);
    std::uniform_int_distribution<std::int64_t> d(1, F.modulus() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) U(i, j) = 0;
        U(i, i) = F.from_int(d(rng));
    }
    return U;
}

ElemMat random_lower(std::size_t n, const PrimeField& F,
                     std::mt19937_64& rng) {
    ElemMat L = random_matrix(n, n, F, rng);
    std::uniform_int_distribution<std::int64_t> d(1, F.modulus() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) L(i, j) = 0;
        L(i, i) = F.from_int(d(rng));
    }
    return L;
}

// Rejection-sampled matrix with generic rank profile.
ElemMat random_grp(std::size_t n, const PrimeField& F, std::mt19937_64& rng) {
    for (;;) {
        ElemMat A = random_matrix(n, n, F, rng);
        try {
            lu(A.view(), F);
            return A;
        } catch (const GenericRankProfileViolation&) {
        }
    }
}

}  // namespace

TEST_CASE("trsm_upper basics") {
    PrimeField F(131071);
    std::mt19937_64 rng(41);
    ElemMat I = ElemMat::identity(9);
    ElemMat B = random_matrix(9, 4, F, rng);
    CHECK(trsm_upper(I.view(), B.view(), F) == B);

    // diagonal system: row-wise scaling by the inverse diagonal
    ElemMat D(5, 5);
    std::vector<std::int64_t> diag{3, 7, 11, 2, 9};
    for (std::size_t i = 0; i < 5; ++i) D(i, i) = diag[i];
    ElemMat B2 = random_matrix(5, 3, F, rng);
    ElemMat X = trsm_upper(D.view(), B2.view(), F);
    for (std::size_t i = 0; i < 5; ++i) {
        std::int64_t inv = F.inv(diag[i]);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(X(i, j) == F.mul(inv, B2(i, j)));
    }
}

TEST_CASE("trsm residuals on random triangular systems") {
    PrimeField F(131071);
    std::mt19937_64 rng(42);
    for (std::size_t n : {1u, 2u, 5u, 17u, 32u, 65u}) {
        ElemMat U = random_upper(n, F, rng);
        ElemMat B = random_matrix(n, 7, F, rng);
        ElemMat X = trsm_upper(U.view(), B.view(), F);
        CHECK(mm_reference(U.view(), X.view(), F) == B);

        ElemMat L = random_lower(n, F, rng);
        ElemMat Y = trsm_lower(L.view(), B.view(), F);
        CHECK(mm_reference(L.view(), Y.view(), F) == B);
    }
}

TEST_CASE("trsm_lower forward substitution example") {
    PrimeField F(101);
    ElemMat L(2, 2);
    L(0, 0) = 1;
    L(1, 0) = 7;  // a
    L(1, 1) = 1;
    ElemMat B(2, 1);
    B(0, 0) = 5;   // b1
    B(1, 0) = 11;  // b2
    ElemMat X = trsm_lower(L.view(), B.view(), F);
    CHECK(X(0, 0) == 5);
    CHECK(X(1, 0) == F.sub(11, F.mul(7, 5)));
}

TEST_CASE("trsm rejects zero diagonals") {
    PrimeField F(37);
    ElemMat U(2, 2);
    U(0, 0) = 1;
    U(1, 1) = 0;
    ElemMat B(2, 1);
    B(0, 0) = 1;
    CHECK_THROWS_AS(trsm_upper(U.view(), B.view(), F), NotInvertibleError);
}

TEST_CASE("lu on hand cases") {
    PrimeField F(101);
    ElemMat I = ElemMat::identity(4);
    LuResult f = lu(I.view(), F);
    CHECK(f.L == I);
    CHECK(f.U == I);

    ElemMat A(2, 2);
    A(0, 0) = 2; A(0, 1) = 1; A(1, 0) = 4; A(1, 1) = 3;
    LuResult g = lu(A.view(), F);
    CHECK(g.L(0, 0) == 1);
    CHECK(g.L(1, 0) == 2);
    CHECK(g.L(1, 1) == 1);
    CHECK(g.U(0, 0) == 2);
    CHECK(g.U(0, 1) == 1);
    CHECK(g.U(1, 1) == 1);
    CHECK(det(A.view(), F) == 2);
}

TEST_CASE("lu reconstruction on random generic-rank-profile matrices") {
    PrimeField F(131071);
    std::mt19937_64 rng(43);
    for (int t = 0; t < 60; ++t) {
        std::size_t n = 1 + static_cast<std::size_t>(rng() % 48);
        ElemMat A = random_grp(n, F, rng);
        LuResult f = lu(A.view(), F);
        // L unit lower, U invertible upper
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(f.L(i, i) == 1);
            CHECK(f.U(i, i) != 0);
            for (std::size_t j = i + 1; j < n; ++j) CHECK(f.L(i, j) == 0);
            for (std::size_t j = 0; j < i; ++j) CHECK(f.U(i, j) == 0);
        }
        CHECK(mm_reference(f.L.view(), f.U.view(), F) == A);
    }
}

TEST_CASE("lu rejects rank-profile violations") {
    PrimeField F(37);
    ElemMat A(2, 2);
    A(0, 0) = 0;  // singular leading minor, invertible matrix
    A(0, 1) = 1;
    A(1, 0) = 1;
    A(1, 1) = 0;
    CHECK_THROWS_AS(lu(A.view(), F), GenericRankProfileViolation);
}

TEST_CASE("det and inverse") {
    PrimeField F(131071);
    std::mt19937_64 rng(44);
    ElemMat I = ElemMat::identity(6);
    CHECK(det(I.view(), F) == 1);
    CHECK(inverse(I.view(), F) == I);

    for (std::size_t n : {2u, 3u, 9u, 20u, 33u}) {
        ElemMat A = random_grp(n, F, rng);
        ElemMat X = inverse(A.view(), F);
        CHECK(mm_reference(A.view(), X.view(), F) == ElemMat::identity(n));
    }
}

TEST_CASE("multiplications are overwhelmingly inside fast MM calls") {
    PrimeField F(131071);
    std::mt19937_64 rng(45);
    const std::size_t n = 512;
    ElemMat A = random_grp(n, F, rng);
    CascadeConfig cfg;
    cfg.base_threshold = 32;
    OpCounter ops;
    FactorStats stats;
    lu(A.view(), F, cfg, &ops, &stats);
    CHECK(stats.mm_mults * 10 >= ops.mults * 9);

    ElemMat U = random_upper(n, F, rng);
    ElemMat B = random_matrix(n, n, F, rng);
    OpCounter tops;
    FactorStats tstats;
    trsm_upper(U.view(), B.view(), F, cfg, &tops, &tstats);
    CHECK(tstats.mm_mults * 10 >= tops.mults * 9);
}
