#include "doctest.h"

#include <random>

#include "ffmm/multiply.hpp"
#include "ffmm/schemes.hpp"
#include "test_util.hpp"

using namespace ffmm;
using testutil::mm_reference;
using testutil::random_matrix;

namespace {

std::uint64_t pow_u64(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

}  // namespace

TEST_CASE("mm_classic basics") {
    PrimeField F(101);
    std::mt19937_64 rng(1);
    ElemMat B = random_matrix(6, 6, F, rng);
    ElemMat I = ElemMat::identity(6);
    CHECK(mm_classic(I.view(), B.view(), F) == B);

    ElemMat A2(2, 2), B2(2, 2);
    A2(0, 0) = 1; A2(0, 1) = 2; A2(1, 0) = 3; A2(1, 1) = 4;
    B2(0, 0) = 5; B2(0, 1) = 6; B2(1, 0) = 7; B2(1, 1) = 8;
    ElemMat C2 = mm_classic(A2.view(), B2.view(), F);
    CHECK(C2(0, 0) == 19);
    CHECK(C2(0, 1) == 22);
    CHECK(C2(1, 0) == 43);
    CHECK(C2(1, 1) == 50);
}

TEST_CASE("mm_classic counters are m*n*p and m*p*(n-1)") {
    PrimeField F(37);
    std::mt19937_64 rng(2);
    for (std::size_t n : {3u, 8u, 13u}) {
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        OpCounter ops;
        mm_classic(A.view(), B.view(), F, &ops);
        CHECK(ops.mults == std::uint64_t(n) * n * n);
        CHECK(ops.adds == std::uint64_t(n) * n * (n - 1));
        CHECK(ops.field_ops() == 2 * std::uint64_t(n) * n * n -
                                     std::uint64_t(n) * n);
    }
}

TEST_CASE("mm_waksman multiplication count is exactly n^3/2 + n^2") {
    PrimeField F(131071);
    std::mt19937_64 rng(3);
    for (std::size_t n = 2; n <= 64; n += 2) {
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        OpCounter ops;
        ElemMat C = mm_waksman(A.view(), B.view(), F, &ops);
        CHECK(ops.mults == n * n * n / 2 + n * n);
        CHECK(C == mm_reference(A.view(), B.view(), F));
    }
}

TEST_CASE("mm_waksman rectangular count and oracle agreement") {
    PrimeField F(131071);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> dim(1, 24);
    for (int t = 0; t < 200; ++t) {
        std::size_t m = dim(rng), n = 2 * dim(rng), p = dim(rng);
        ElemMat A = random_matrix(m, n, F, rng);
        ElemMat B = random_matrix(n, p, F, rng);
        OpCounter ops;
        ElemMat C = mm_waksman(A.view(), B.view(), F, &ops);
        CHECK(C == mm_reference(A.view(), B.view(), F));
        CHECK(ops.mults == m * n * p / 2 + (m + p) * n / 2);
    }
}

TEST_CASE("mm_waksman rejects odd inner dimension") {
    PrimeField F(37);
    ElemMat A(2, 3), B(3, 2);
    CHECK_THROWS_AS(mm_waksman(A.view(), B.view(), F), DimensionError);
}

TEST_CASE("mm_waksman inner-product case") {
    PrimeField F(131071);
    ElemMat u(1, 2), v(2, 1);
    u(0, 0) = 1; u(0, 1) = 2;
    v(0, 0) = 3; v(1, 0) = 4;
    ElemMat C = mm_waksman(u.view(), v.view(), F);
    CHECK(C(0, 0) == 11);  // (1+4)(3+2) - 1*2 - 3*4
}

TEST_CASE("winograd/strassen step: identity and 7 multiplications") {
    PrimeField F(37);
    std::mt19937_64 rng(5);
    for (auto step : {&winograd_step, &strassen_step}) {
        ElemMat U = ElemMat::identity(2);
        ElemMat V = random_matrix(2, 2, F, rng);
        ElemMat X(2, 2);
        OpCounter ops;
        int muls = 0;
        BlockMul mul = [&](ElemView C, ConstElemView A, ConstElemView B) {
            ++muls;
            mm_classic_into(C, A, B, F, &ops);
        };
        step(X.view(), U.view(), V.view(), F, mul, &ops, nullptr, 0);
        CHECK(muls == 7);
        CHECK(X == V);
    }
}

TEST_CASE("winograd/strassen step agrees with the classical oracle") {
    PrimeField F(37);
    std::mt19937_64 rng(6);
    for (int t = 0; t < 500; ++t) {
        ElemMat U = random_matrix(2, 2, F, rng);
        ElemMat V = random_matrix(2, 2, F, rng);
        ElemMat R = mm_reference(U.view(), V.view(), F);
        for (auto step : {&winograd_step, &strassen_step}) {
            ElemMat X(2, 2);
            BlockMul mul = [&](ElemView C, ConstElemView A, ConstElemView B) {
                mm_classic_into(C, A, B, F);
            };
            step(X.view(), U.view(), V.view(), F, mul, nullptr, nullptr, 0);
            CHECK(X == R);
        }
    }
}

TEST_CASE("full recursion operation-count laws") {
    PrimeField F(37);
    std::mt19937_64 rng(7);
    for (int k = 1; k <= 6; ++k) {
        std::size_t n = std::size_t(1) << k;
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);

        CascadeConfig cfg;
        cfg.base_threshold = 1;
        cfg.scheme = SchemeKind::Winograd;
        OpCounter w;
        WorkspaceStats ws;
        ElemMat Cw = mm_fast(A.view(), B.view(), F, cfg, &w, &ws);
        CHECK(w.field_ops() == 6 * pow_u64(7, k) - 5 * pow_u64(4, k));
        CHECK(Cw == mm_reference(A.view(), B.view(), F));
        for (std::size_t l = 0; l < ws.blocks.size(); ++l) {
            CHECK(ws.blocks[l] <= 2);  // two temporaries at every level
            CHECK(ws.elems[l] <= (n >> (l + 1)) * (n >> (l + 1)));
        }

        cfg.scheme = SchemeKind::Strassen;
        OpCounter s;
        ElemMat Cs = mm_fast(A.view(), B.view(), F, cfg, &s);
        CHECK(s.field_ops() == 7 * pow_u64(7, k) - 6 * pow_u64(4, k));
        CHECK(Cs == mm_reference(A.view(), B.view(), F));
    }
}

TEST_CASE("degenerate cascade equals mm_classic counters") {
    PrimeField F(37);
    std::mt19937_64 rng(8);
    ElemMat A = random_matrix(16, 16, F, rng);
    ElemMat B = random_matrix(16, 16, F, rng);
    CascadeConfig cfg;
    cfg.base_threshold = 16;
    OpCounter fast, classic;
    ElemMat C1 = mm_fast(A.view(), B.view(), F, cfg, &fast);
    ElemMat C2 = mm_classic(A.view(), B.view(), F, &classic);
    CHECK(C1 == C2);
    CHECK(fast.mults == classic.mults);
    CHECK(fast.adds == classic.adds);
    CHECK(fast.reductions == classic.reductions);
}

TEST_CASE("mm_fast matches mm_classic on all small shapes") {
    PrimeField F(37);
    std::mt19937_64 rng(9);
    CascadeConfig cfg;
    cfg.base_threshold = 2;
    for (std::size_t m = 1; m <= 9; ++m)
        for (std::size_t n = 1; n <= 9; ++n)
            for (std::size_t p = 1; p <= 9; ++p) {
                ElemMat A = random_matrix(m, n, F, rng);
                ElemMat B = random_matrix(n, p, F, rng);
                ElemMat C = mm_fast(A.view(), B.view(), F, cfg);
                CHECK(C == mm_reference(A.view(), B.view(), F));
            }
}

TEST_CASE("mm_fast via a generic verified scheme") {
    PrimeField F(37);
    std::mt19937_64 rng(10);
    BilinearScheme s = strassen_scheme();
    CascadeConfig cfg;
    cfg.scheme = SchemeKind::Generic;
    cfg.generic = &s;
    cfg.base_threshold = 2;
    for (std::size_t m : {1u, 3u, 5u, 8u, 12u})
        for (std::size_t p : {1u, 4u, 7u, 9u}) {
            std::size_t n = (m * p) % 11 + 1;
            ElemMat A = random_matrix(m, n, F, rng);
            ElemMat B = random_matrix(n, p, F, rng);
            ElemMat C = mm_fast(A.view(), B.view(), F, cfg);
            CHECK(C == mm_reference(A.view(), B.view(), F));
        }
}

TEST_CASE("mm_fast_acc beta semantics and workspace bound") {
    PrimeField F(131071);
    std::mt19937_64 rng(11);
    CascadeConfig cfg;
    cfg.base_threshold = 4;
    for (std::size_t n : {5u, 8u, 16u, 21u}) {
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        ElemMat C0 = random_matrix(n, n, F, rng);
        ElemMat R = mm_reference(A.view(), B.view(), F);

        ElemMat C = C0;
        WorkspaceStats ws;
        mm_fast_acc(C.view(), A.view(), B.view(), 0, F, cfg, nullptr, &ws);
        CHECK(C == R);

        C = C0;
        WorkspaceStats ws1;
        mm_fast_acc(C.view(), A.view(), B.view(), 1, F, cfg, nullptr, &ws1);
        ElemMat expect = mat_addsub(C0.view(), R.view(), AddSub::Add, F);
        CHECK(C == expect);
        const std::size_t quarter = ((n + 1) / 2) * ((n + 1) / 2);
        for (std::size_t l = 0; l < ws1.blocks.size(); ++l) {
            CHECK(ws1.blocks[l] <= 2);
            CHECK(ws1.elems[l] <= quarter);
        }

        C = C0;
        mm_fast_acc(C.view(), A.view(), B.view(), -1, F, cfg);
        ElemMat expect2 = mat_addsub(R.view(), C0.view(), AddSub::Sub, F);
        CHECK(C == expect2);
    }
}

TEST_CASE("mm_parallel is bitwise equal to mm_fast") {
    PrimeField F(131071);
    std::mt19937_64 rng(12);
    CascadeConfig cfg;
    cfg.base_threshold = 8;
    for (unsigned tasks : {1u, 2u, 4u, 8u}) {
        cfg.parallel_tasks = tasks;
        ElemMat A = random_matrix(37, 29, F, rng);
        ElemMat B = random_matrix(29, 41, F, rng);
        ElemMat Cs = mm_fast(A.view(), B.view(), F, cfg);
        ElemMat Cp = mm_parallel(A.view(), B.view(), F, cfg);
        CHECK(Cp == Cs);
    }
}

TEST_CASE("mm_parallel splits rows of A while they dominate") {
    PrimeField F(37);
    std::mt19937_64 rng(13);
    ElemMat A = random_matrix(64, 4, F, rng);
    ElemMat B = random_matrix(4, 4, F, rng);
    CascadeConfig cfg;
    cfg.parallel_tasks = 8;
    std::vector<char> trace;
    mm_parallel(A.view(), B.view(), F, cfg, nullptr, &trace);
    for (char c : trace) CHECK(c == 'R');
}

TEST_CASE("hybrid threshold beats both pure strategies at n = 32 and 64") {
    PrimeField F(37);
    std::mt19937_64 rng(14);
    for (std::size_t n : {32u, 64u}) {
        ElemMat A = random_matrix(n, n, F, rng);
        ElemMat B = random_matrix(n, n, F, rng);
        CascadeConfig pure;
        pure.base_threshold = 1;
        CascadeConfig hybrid;
        hybrid.base_threshold = 8;
        OpCounter cp, ch, cc;
        mm_fast(A.view(), B.view(), F, pure, &cp);
        mm_fast(A.view(), B.view(), F, hybrid, &ch);
        mm_classic(A.view(), B.view(), F, &cc);
        CHECK(ch.field_ops() < cp.field_ops());
        CHECK(ch.field_ops() < cc.field_ops());
    }
}

TEST_CASE("deep recursion tightens the base-case reduction schedule") {
    // At depth l the classical kernel must flush at least every
    // floor(k_l) terms; correctness is what we can observe.
    PrimeField F(131071, Rep::Balanced, 53);
    std::mt19937_64 rng(15);
    CascadeConfig cfg;
    cfg.base_threshold = 2;
    cfg.mantissa_bits = 53;
    ElemMat A = random_matrix(48, 48, F, rng);
    ElemMat B = random_matrix(48, 48, F, rng);
    OpCounter deep;
    ElemMat C = mm_fast(A.view(), B.view(), F, cfg, &deep);
    CHECK(C == mm_reference(A.view(), B.view(), F));
    CHECK(deep.reductions > 0);
}
