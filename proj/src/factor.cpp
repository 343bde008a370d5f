#include "ffmm/factor.hpp"

namespace ffmm {

namespace {

// Wraps an mm_fast_acc call, attributing its multiplications to stats.
void acc_tracked(ElemView C, ConstElemView A, ConstElemView B, int beta,
                 const PrimeField& F, const CascadeConfig& cfg,
                 OpCounter* ops, FactorStats* stats) {
    OpCounter local;
    OpCounter* use = ops ? ops : (stats ? &local : nullptr);
    std::uint64_t before = use ? use->mults : 0;
    mm_fast_acc(C, A, B, beta, F, cfg, use);
    if (stats && use) stats->mm_mults += use->mults - before;
}

void negate_into(ElemView dst, ConstElemView src, const PrimeField& F,
                 OpCounter* ops) {
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j)
            dst(i, j) = F.neg(src(i, j));
    if (ops) ops->adds += src.rows() * src.cols();
}

void check_triangular_input(ConstElemView T, ConstElemView B) {
    if (T.rows() != T.cols())
        throw DimensionError("triangular solve: matrix must be square");
    if (T.rows() != B.rows())
        throw DimensionError("triangular solve: shape mismatch");
}

// X <- solution of U X = B, in place over X (pre-filled with B).  Cuts U
// into [[U1, V], [0, U2]] with the odd row attached to the second block.
void trsm_upper_left_inplace(ConstElemView U, ElemView X, const PrimeField& F,
                             const CascadeConfig& cfg, OpCounter* ops,
                             FactorStats* stats) {
    const std::size_t n = U.rows();
    if (n == 1) {
        if (U(0, 0) == 0)
            throw NotInvertibleError("triangular solve: zero diagonal");
        std::int64_t d = F.inv(U(0, 0));
        for (std::size_t k = 0; k < X.cols(); ++k) X(0, k) = F.mul(d, X(0, k));
        if (ops) ops->mults += X.cols() + 1;
        return;
    }
    const std::size_t n1 = n / 2, n2 = n - n1;
    ConstElemView U1 = U.block(0, 0, n1, n1);
    ConstElemView V = U.block(0, n1, n1, n2);
    ConstElemView U2 = U.block(n1, n1, n2, n2);
    ElemView X1 = X.block(0, 0, n1, X.cols());
    ElemView X2 = X.block(n1, 0, n2, X.cols());
    trsm_upper_left_inplace(U2, X2, F, cfg, ops, stats);
    // B1' = B1 - V X2
    ElemMat negV(n1, n2);
    negate_into(negV.view(), V, F, ops);
    acc_tracked(X1, negV.view(), X2, 1, F, cfg, ops, stats);
    trsm_upper_left_inplace(U1, X1, F, cfg, ops, stats);
}

// X <- solution of L X = B.  unit_diag treats the diagonal as ones, which
// lets the packed LU storage be read directly.
void trsm_lower_left_inplace(ConstElemView L, ElemView X, const PrimeField& F,
                             const CascadeConfig& cfg, bool unit_diag,
                             OpCounter* ops, FactorStats* stats) {
    const std::size_t n = L.rows();
    if (n == 1) {
        if (unit_diag) return;
        if (L(0, 0) == 0)
            throw NotInvertibleError("triangular solve: zero diagonal");
        std::int64_t d = F.inv(L(0, 0));
        for (std::size_t k = 0; k < X.cols(); ++k) X(0, k) = F.mul(d, X(0, k));
        if (ops) ops->mults += X.cols() + 1;
        return;
    }
    const std::size_t n1 = n / 2, n2 = n - n1;
    ConstElemView L1 = L.block(0, 0, n1, n1);
    ConstElemView G = L.block(n1, 0, n2, n1);
    ConstElemView L2 = L.block(n1, n1, n2, n2);
    ElemView X1 = X.block(0, 0, n1, X.cols());
    ElemView X2 = X.block(n1, 0, n2, X.cols());
    trsm_lower_left_inplace(L1, X1, F, cfg, unit_diag, ops, stats);
    ElemMat negG(n2, n1);
    negate_into(negG.view(), G, F, ops);
    acc_tracked(X2, negG.view(), X1, 1, F, cfg, ops, stats);
    trsm_lower_left_inplace(L2, X2, F, cfg, unit_diag, ops, stats);
}

// X <- solution of X U = B (right division by an upper triangular U); only
// the diagonal and upper entries of U are read.
void trsm_upper_right_inplace(ElemView X, ConstElemView U, const PrimeField& F,
                              const CascadeConfig& cfg, OpCounter* ops,
                              FactorStats* stats) {
    const std::size_t n = U.rows();
    if (n == 1) {
        if (U(0, 0) == 0)
            throw NotInvertibleError("triangular solve: zero diagonal");
        std::int64_t d = F.inv(U(0, 0));
        for (std::size_t i = 0; i < X.rows(); ++i) X(i, 0) = F.mul(X(i, 0), d);
        if (ops) ops->mults += X.rows() + 1;
        return;
    }
    const std::size_t n1 = n / 2, n2 = n - n1;
    ConstElemView U1 = U.block(0, 0, n1, n1);
    ConstElemView V = U.block(0, n1, n1, n2);
    ConstElemView U2 = U.block(n1, n1, n2, n2);
    ElemView X1 = X.block(0, 0, X.rows(), n1);
    ElemView X2 = X.block(0, n1, X.rows(), n2);
    trsm_upper_right_inplace(X1, U1, F, cfg, ops, stats);
    // B2' = B2 - X1 V
    ElemMat negV(n1, n2);
    negate_into(negV.view(), V, F, ops);
    acc_tracked(X2, X1, negV.view(), 1, F, cfg, ops, stats);
    trsm_upper_right_inplace(X2, U2, F, cfg, ops, stats);
}

// Packed block factorization: on return the strictly lower part of A holds
// L (unit diagonal implicit) and the upper part holds U.
void lu_inplace(ElemView A, const PrimeField& F, const CascadeConfig& cfg,
                OpCounter* ops, FactorStats* stats) {
    const std::size_t n = A.rows();
    if (n == 1) {
        if (A(0, 0) == 0)
            throw GenericRankProfileViolation(
                "lu: leading principal minor is singular");
        return;
    }
    const std::size_t n1 = n / 2, n2 = n - n1;
    ElemView A1 = A.block(0, 0, n1, n1), A2 = A.block(0, n1, n1, n2);
    ElemView A3 = A.block(n1, 0, n2, n1), A4 = A.block(n1, n1, n2, n2);
    lu_inplace(A1, F, cfg, ops, stats);
    // G = A3 U1^-1 and H = L1^-1 A2, both read from the packed A1.
    trsm_upper_right_inplace(A3, A1, F, cfg, ops, stats);
    trsm_lower_left_inplace(A1, A2, F, cfg, /*unit_diag=*/true, ops, stats);
    // Schur complement Z = A4 - G H.
    ElemMat negG(n2, n1);
    negate_into(negG.view(), A3, F, ops);
    acc_tracked(A4, negG.view(), A2, 1, F, cfg, ops, stats);
    lu_inplace(A4, F, cfg, ops, stats);
}

}  // namespace

ElemMat trsm_upper(ConstElemView U, ConstElemView B, const PrimeField& F,
                   const CascadeConfig& cfg, OpCounter* ops,
                   FactorStats* stats) {
    check_triangular_input(U, B);
    ElemMat X(B.rows(), B.cols());
    mat_copy(X.view(), B);
    if (U.rows()) trsm_upper_left_inplace(U, X.view(), F, cfg, ops, stats);
    return X;
}

ElemMat trsm_lower(ConstElemView L, ConstElemView B, const PrimeField& F,
                   const CascadeConfig& cfg, OpCounter* ops,
                   FactorStats* stats) {
    check_triangular_input(L, B);
    ElemMat X(B.rows(), B.cols());
    mat_copy(X.view(), B);
    if (L.rows())
        trsm_lower_left_inplace(L, X.view(), F, cfg, /*unit_diag=*/false, ops,
                                stats);
    return X;
}

LuResult lu(ConstElemView A, const PrimeField& F, const CascadeConfig& cfg,
            OpCounter* ops, FactorStats* stats) {
    if (A.rows() != A.cols()) throw DimensionError("lu: matrix must be square");
    const std::size_t n = A.rows();
    ElemMat P(n, n);
    mat_copy(P.view(), A);
    if (n) lu_inplace(P.view(), F, cfg, ops, stats);
    LuResult r{ElemMat(n, n), ElemMat(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        r.L(i, i) = 1;
        for (std::size_t j = 0; j < i; ++j) r.L(i, j) = P(i, j);
        for (std::size_t j = i; j < n; ++j) r.U(i, j) = P(i, j);
    }
    return r;
}

std::int64_t det(ConstElemView A, const PrimeField& F,
                 const CascadeConfig& cfg, OpCounter* ops) {
    LuResult f = lu(A, F, cfg, ops);
    std::int64_t d = 1;
    for (std::size_t i = 0; i < A.rows(); ++i) d = F.mul(d, f.U(i, i));
    if (ops) ops->mults += A.rows();
    return d;
}

ElemMat inverse(ConstElemView A, const PrimeField& F, const CascadeConfig& cfg,
                OpCounter* ops) {
    LuResult f = lu(A, F, cfg, ops);
    ElemMat I = ElemMat::identity(A.rows());
    ElemMat Y = trsm_lower(f.L, I.view(), F, cfg, ops);
    return trsm_upper(f.U, Y.view(), F, cfg, ops);
}

}  // namespace ffmm
