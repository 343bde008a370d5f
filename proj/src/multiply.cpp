#include "ffmm/multiply.hpp"

#include <algorithm>
#include <future>

#include "ffmm/schemes.hpp"

namespace ffmm {

namespace {

// Largest base-case accumulation length admissible after `depth` recursive
// 2x2 cuts: 9^depth * c * M^2 < 2^m.  Zero means reduce every product.
std::int64_t depth_chunk(const PrimeField& F, int mantissa_bits, int depth) {
    const unsigned __int128 limit =
        (static_cast<unsigned __int128>(1) << mantissa_bits) - 1;
    const unsigned __int128 mag =
        F.rep() == Rep::Balanced
            ? static_cast<unsigned __int128>(F.half())
            : static_cast<unsigned __int128>(F.modulus() - 1);
    unsigned __int128 denom = mag * mag;
    for (int i = 0; i < depth; ++i) {
        if (denom > limit) return 0;
        denom *= 9;
    }
    if (denom == 0) return INT64_MAX;
    unsigned __int128 c = limit / denom;
    const unsigned __int128 imax = INT64_MAX;
    return static_cast<std::int64_t>(c > imax ? imax : c);
}

void check_mm_dims(ConstElemView A, ConstElemView B) {
    if (A.cols() != B.rows())
        throw DimensionError("matrix product: inner dimensions differ");
}

// C (+)= sign * X elementwise.
void mat_acc_signed(ElemView C, ConstElemView X, int sign, const PrimeField& F,
                    OpCounter* ops) {
    mat_addsub(C, ConstElemView(C.data(), C.rows(), C.cols(), C.stride()), X,
               sign > 0 ? AddSub::Add : AddSub::Sub, F, ops);
}

struct TempBuf {
    std::vector<std::int64_t> buf;
    explicit TempBuf(std::size_t elems) : buf(elems, 0) {}
    ElemView as(std::size_t r, std::size_t c) {
        return ElemView(buf.data(), r, c, c);
    }
};

}  // namespace

void mm_classic_into(ElemView C, ConstElemView A, ConstElemView B,
                     const PrimeField& F, OpCounter* ops, int depth,
                     int mantissa_bits, int acc_mode) {
    check_mm_dims(A, B);
    if (C.rows() != A.rows() || C.cols() != B.cols())
        throw DimensionError("matrix product: output shape mismatch");
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    const std::int64_t chunk = depth_chunk(F, mantissa_bits, depth);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
            std::int64_t d = delayed_dot_chunked(A.row(i), 1, &B(0, k),
                                                 B.stride(), n, F, chunk, ops);
            if (acc_mode == 0)
                C(i, k) = d;
            else if (acc_mode > 0)
                C(i, k) = F.add(C(i, k), d);
            else
                C(i, k) = F.sub(C(i, k), d);
        }
    }
    if (acc_mode != 0 && ops) ops->adds += static_cast<std::uint64_t>(m) * p;
}

ElemMat mm_classic(ConstElemView A, ConstElemView B, const PrimeField& F,
                   OpCounter* ops) {
    ElemMat C(A.rows(), B.cols());
    mm_classic_into(C.view(), A, B, F, ops, 0, F.mantissa_bits(), 0);
    return C;
}

ElemMat mm_waksman(ConstElemView A, ConstElemView B, const PrimeField& F,
                   OpCounter* ops) {
    check_mm_dims(A, B);
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    if (n % 2 != 0)
        throw DimensionError("mm_waksman: inner dimension must be even");
    ElemMat C(m, p);
    const std::size_t nh = n / 2;
    if (nh == 0) return C;

    const std::int64_t chunk = depth_chunk(F, F.mantissa_bits(), 0);
    OpCounter dot;  // reductions tracked here, mults/adds set by formula

    // Correction terms: one per row of A and one per column of B.
    std::vector<std::int64_t> rho(m), sigma(p);
    for (std::size_t i = 0; i < m; ++i)
        rho[i] = delayed_dot_chunked(A.row(i), 2, A.row(i) + 1, 2, nh, F,
                                     chunk, &dot);
    for (std::size_t k = 0; k < p; ++k)
        sigma[k] = delayed_dot_chunked(&B(0, k), 2 * B.stride(), &B(1, k),
                                       2 * B.stride(), nh, F, chunk, &dot);

    std::vector<std::int64_t> left(nh), right(nh);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t t = 0; t < nh; ++t) {
                left[t] = F.add(A(i, 2 * t), B(2 * t + 1, k));
                right[t] = F.add(B(2 * t, k), A(i, 2 * t + 1));
            }
            std::int64_t s = delayed_dot_chunked(left.data(), 1, right.data(),
                                                 1, nh, F, chunk, &dot);
            C(i, k) = F.sub(F.sub(s, rho[i]), sigma[k]);
        }
    }
    if (ops) {
        ops->mults += dot.mults;  // = 0.5*m*n*p + (m+p)*n/2 exactly
        ops->adds += dot.adds +
                     static_cast<std::uint64_t>(m) * p * (2 * nh + 2);
        ops->reductions += dot.reductions;
    }
    return C;
}

// --------------------------------------------------------------------------
// 2x2 step schedules.  Both use two temporary buffers plus the output
// quadrants as scratch; operation counts are exact: 7 block products and
// 15 (Winograd) or 18 (Strassen) block additions.
// --------------------------------------------------------------------------

void winograd_step(ElemView X, ConstElemView U, ConstElemView V,
                   const PrimeField& F, const BlockMul& mul, OpCounter* ops,
                   WorkspaceStats* ws, std::size_t level) {
    const std::size_t m = U.rows(), n = U.cols(), p = V.cols();
    if (m % 2 || n % 2 || p % 2)
        throw DimensionError("winograd_step: dimensions must be even");
    const std::size_t m2 = m / 2, n2 = n / 2, p2 = p / 2;

    ConstElemView A11 = U.block(0, 0, m2, n2), A12 = U.block(0, n2, m2, n2);
    ConstElemView A21 = U.block(m2, 0, m2, n2), A22 = U.block(m2, n2, m2, n2);
    ConstElemView B11 = V.block(0, 0, n2, p2), B12 = V.block(0, p2, n2, p2);
    ConstElemView B21 = V.block(n2, 0, n2, p2), B22 = V.block(n2, p2, n2, p2);
    ElemView C11 = X.block(0, 0, m2, p2), C12 = X.block(0, p2, m2, p2);
    ElemView C21 = X.block(m2, 0, m2, p2), C22 = X.block(m2, p2, m2, p2);

    const std::size_t s_elems = m2 * n2, t_elems = n2 * p2, c_elems = m2 * p2;
    TempBuf xb(std::max(s_elems, c_elems)), yb(t_elems);
    if (ws) ws->note(level, 2, std::max({s_elems, t_elems, c_elems}));

    ElemView Xs = xb.as(m2, n2);
    ElemView Yt = yb.as(n2, p2);

    mat_addsub(Xs, A11, A21, AddSub::Sub, F, ops);   // S3
    mat_addsub(Yt, B22, B12, AddSub::Sub, F, ops);   // T3
    mul(C21, Xs, Yt);                                // P7 = S3 T3
    mat_addsub(Xs, A21, A22, AddSub::Add, F, ops);   // S1
    mat_addsub(Yt, B12, B11, AddSub::Sub, F, ops);   // T1
    mul(C22, Xs, Yt);                                // P5 = S1 T1
    mat_addsub(Xs, Xs, A11, AddSub::Sub, F, ops);    // S2 = S1 - A11
    mat_addsub(Yt, B22, Yt, AddSub::Sub, F, ops);    // T2 = B22 - T1
    mul(C12, Xs, Yt);                                // P6 = S2 T2
    mat_addsub(Xs, A12, Xs, AddSub::Sub, F, ops);    // S4 = A12 - S2
    mat_addsub(Yt, Yt, B21, AddSub::Sub, F, ops);    // T4 = T2 - B21
    mul(C11, Xs, B22);                               // P3 = S4 B22
    ElemView Xp = xb.as(m2, p2);
    mul(Xp, A11, B11);                               // P1
    mat_addsub(C12, C12, Xp, AddSub::Add, F, ops);   // W  = P1 + P6
    mat_addsub(C21, C12, C21, AddSub::Add, F, ops);  // U2 = W + P7
    mat_addsub(C12, C12, C22, AddSub::Add, F, ops);  // U3 = W + P5
    mat_addsub(C22, C21, C22, AddSub::Add, F, ops);  // x22 = U2 + P5
    mat_addsub(C12, C12, C11, AddSub::Add, F, ops);  // x12 = U3 + P3
    mul(C11, A22, Yt);                               // P4 = A22 T4
    mat_addsub(C21, C21, C11, AddSub::Sub, F, ops);  // x21 = U2 - P4
    mul(C11, A12, B21);                              // P2
    mat_addsub(C11, C11, Xp, AddSub::Add, F, ops);   // x11 = P2 + P1
}

void strassen_step(ElemView X, ConstElemView U, ConstElemView V,
                   const PrimeField& F, const BlockMul& mul, OpCounter* ops,
                   WorkspaceStats* ws, std::size_t level) {
    const std::size_t m = U.rows(), n = U.cols(), p = V.cols();
    if (m % 2 || n % 2 || p % 2)
        throw DimensionError("strassen_step: dimensions must be even");
    const std::size_t m2 = m / 2, n2 = n / 2, p2 = p / 2;

    ConstElemView A11 = U.block(0, 0, m2, n2), A12 = U.block(0, n2, m2, n2);
    ConstElemView A21 = U.block(m2, 0, m2, n2), A22 = U.block(m2, n2, m2, n2);
    ConstElemView B11 = V.block(0, 0, n2, p2), B12 = V.block(0, p2, n2, p2);
    ConstElemView B21 = V.block(n2, 0, n2, p2), B22 = V.block(n2, p2, n2, p2);
    ElemView C11 = X.block(0, 0, m2, p2), C12 = X.block(0, p2, m2, p2);
    ElemView C21 = X.block(m2, 0, m2, p2), C22 = X.block(m2, p2, m2, p2);

    const std::size_t s_elems = m2 * n2, t_elems = n2 * p2, c_elems = m2 * p2;
    TempBuf xb(std::max(s_elems, t_elems)), yb(std::max(t_elems, c_elems));
    if (ws) ws->note(level, 2, std::max({s_elems, t_elems, c_elems}));

    ElemView Xs = xb.as(m2, n2);
    ElemView Yt = yb.as(n2, p2);

    mat_addsub(Xs, A11, A22, AddSub::Add, F, ops);
    mat_addsub(Yt, B11, B22, AddSub::Add, F, ops);
    mul(C11, Xs, Yt);                                // p1
    mat_addsub(Xs, A21, A11, AddSub::Sub, F, ops);
    mat_addsub(Yt, B11, B12, AddSub::Add, F, ops);
    mul(C22, Xs, Yt);                                // p4
    mat_addsub(Xs, A12, A22, AddSub::Sub, F, ops);
    mat_addsub(Yt, B21, B22, AddSub::Add, F, ops);
    mul(C21, Xs, Yt);                                // p7
    mat_addsub(C21, C21, C11, AddSub::Add, F, ops);  // p1 + p7
    mat_addsub(C22, C22, C11, AddSub::Add, F, ops);  // p1 + p4
    ElemView Xt = xb.as(n2, p2);
    mat_addsub(Xt, B12, B22, AddSub::Sub, F, ops);
    mul(C12, A11, Xt);                               // p3
    mat_addsub(C22, C22, C12, AddSub::Add, F, ops);  // p1 + p4 + p3
    ElemView Xs2 = xb.as(m2, n2);
    mat_addsub(Xs2, A11, A12, AddSub::Add, F, ops);
    mul(C11, Xs2, B22);                              // p5
    mat_addsub(C12, C12, C11, AddSub::Add, F, ops);  // x12 = p3 + p5
    mat_addsub(C21, C21, C11, AddSub::Sub, F, ops);  // p1 + p7 - p5
    ElemView Xt2 = xb.as(n2, p2);
    mat_addsub(Xt2, B21, B11, AddSub::Sub, F, ops);
    mul(C11, A22, Xt2);                              // p6
    mat_addsub(C21, C21, C11, AddSub::Add, F, ops);  // x11 value
    ElemView Xs3 = xb.as(m2, n2);
    mat_addsub(Xs3, A21, A22, AddSub::Add, F, ops);
    ElemView Yp = yb.as(m2, p2);
    mul(Yp, Xs3, B11);                               // p2
    mat_addsub(C22, C22, Yp, AddSub::Sub, F, ops);   // x22 = p1+p3+p4-p2
    mat_addsub(Yp, C11, Yp, AddSub::Add, F, ops);    // x21 value = p6 + p2
    mat_copy(C11, ConstElemView(C21));
    mat_copy(C21, ConstElemView(Yp));
}

// --------------------------------------------------------------------------
// Recursive cascade with dynamic peeling.
// --------------------------------------------------------------------------

namespace {

struct FastCtx {
    const PrimeField& F;
    const CascadeConfig& cfg;
    OpCounter* ops;
    WorkspaceStats* ws;
};

bool use_classic(const FastCtx& ctx, std::size_t m, std::size_t n,
                 std::size_t p, int depth) {
    const std::size_t thr = std::max<std::size_t>(1, ctx.cfg.base_threshold);
    if (std::min({m, n, p}) <= thr) return true;
    if (depth >= ctx.cfg.max_levels) return true;
    if (ctx.cfg.scheme == SchemeKind::Generic) {
        const BilinearScheme* s = ctx.cfg.generic;
        if (!s) return true;
        if (m < s->m() || n < s->n() || p < s->p()) return true;
    }
    return false;
}

void fast_product_rec(ElemView C, ConstElemView A, ConstElemView B,
                      const FastCtx& ctx, int depth);

// Fix-ups for the odd fringes left by a 2x2 (or m0 x n0 x p0) cut.  The even
// core C[0:m2, 0:p2] has already been computed; fringe panels are written
// (product) or accumulated (acc_mode != 0).
void peel_fixups(ElemView C, ConstElemView A, ConstElemView B,
                 std::size_t m2, std::size_t n2, std::size_t p2, int sign,
                 bool overwrite_fringes, const FastCtx& ctx, int depth) {
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    if (n2 < n && m2 > 0 && p2 > 0) {
        // Peeled inner columns: low-rank update of the even core.
        const std::int64_t chunk =
            depth_chunk(ctx.F, ctx.cfg.mantissa_bits, depth);
        for (std::size_t i = 0; i < m2; ++i) {
            for (std::size_t k = 0; k < p2; ++k) {
                std::int64_t t =
                    delayed_dot_chunked(&A(i, n2), 1, &B(n2, k), B.stride(),
                                        n - n2, ctx.F, chunk, ctx.ops);
                C(i, k) = sign > 0 ? ctx.F.add(C(i, k), t)
                                   : ctx.F.sub(C(i, k), t);
            }
        }
        if (ctx.ops) ctx.ops->adds += static_cast<std::uint64_t>(m2) * p2;
    }
    const int fringe_mode = overwrite_fringes ? 0 : sign;
    if (p2 < p && m2 > 0)
        mm_classic_into(C.block(0, p2, m2, p - p2), A.block(0, 0, m2, n),
                        B.block(0, p2, n, p - p2), ctx.F, ctx.ops, depth,
                        ctx.cfg.mantissa_bits, fringe_mode);
    if (m2 < m)
        mm_classic_into(C.block(m2, 0, m - m2, p), A.block(m2, 0, m - m2, n),
                        B, ctx.F, ctx.ops, depth, ctx.cfg.mantissa_bits,
                        fringe_mode);
}

// Recursion through an arbitrary verified bilinear scheme: inputs are cut
// into an m0 x n0 (resp. n0 x p0) grid of blocks and the scheme's linear
// forms are evaluated blockwise.
void generic_scheme_rec(ElemView C, ConstElemView A, ConstElemView B,
                        const FastCtx& ctx, int depth) {
    const BilinearScheme& s = *ctx.cfg.generic;
    const std::size_t m0 = s.m(), n0 = s.n(), p0 = s.p();
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    const std::size_t bm = m / m0, bn = n / n0, bp = p / p0;
    const std::size_t m2 = bm * m0, n2 = bn * n0, p2 = bp * p0;

    const std::vector<std::int64_t>&alpha = s.alpha_mod(ctx.F),
          &beta = s.beta_mod(ctx.F), &gamma = s.gamma_mod(ctx.F);

    ElemMat Su(bm, bn), Sv(bn, bp), P(bm, bp);
    if (ctx.ws)
        ctx.ws->note(static_cast<std::size_t>(depth), 3,
                     std::max({bm * bn, bn * bp, bm * bp}));
    ElemView core = C.block(0, 0, m2, p2);
    mat_zero(core);
    const std::size_t r = s.rank();
    const PrimeField& F = ctx.F;
    auto axpy = [&](ElemView dst, ConstElemView src, std::int64_t c) {
        for (std::size_t i = 0; i < dst.rows(); ++i)
            for (std::size_t j = 0; j < dst.cols(); ++j)
                dst(i, j) = F.add(dst(i, j), c == 1 ? src(i, j)
                                             : c == -1 ? F.neg(src(i, j))
                                                       : F.mul(c, src(i, j)));
        if (ctx.ops) {
            ctx.ops->adds += dst.rows() * dst.cols();
            if (c != 1 && c != -1)
                ctx.ops->mults += dst.rows() * dst.cols();
        }
    };
    for (std::size_t q = 0; q < r; ++q) {
        mat_zero(Su.view());
        for (std::size_t ij = 0; ij < m0 * n0; ++ij) {
            std::int64_t c = alpha[q * m0 * n0 + ij];
            if (c == 0) continue;
            axpy(Su.view(), A.block((ij / n0) * bm, (ij % n0) * bn, bm, bn),
                 c);
        }
        mat_zero(Sv.view());
        for (std::size_t jk = 0; jk < n0 * p0; ++jk) {
            std::int64_t c = beta[q * n0 * p0 + jk];
            if (c == 0) continue;
            axpy(Sv.view(), B.block((jk / p0) * bn, (jk % p0) * bp, bn, bp),
                 c);
        }
        fast_product_rec(P.view(), Su.view(), Sv.view(), ctx, depth + 1);
        for (std::size_t ik = 0; ik < m0 * p0; ++ik) {
            std::int64_t c = gamma[ik * r + q];
            if (c == 0) continue;
            axpy(core.block((ik / p0) * bm, (ik % p0) * bp, bm, bp), P.view(),
                 c);
        }
    }
    if (m2 != m || n2 != n || p2 != p)
        peel_fixups(C, A, B, m2, n2, p2, +1, true, ctx, depth);
}

void fast_product_rec(ElemView C, ConstElemView A, ConstElemView B,
                      const FastCtx& ctx, int depth) {
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    if (use_classic(ctx, m, n, p, depth)) {
        mm_classic_into(C, A, B, ctx.F, ctx.ops, depth, ctx.cfg.mantissa_bits,
                        0);
        return;
    }
    if (ctx.cfg.scheme == SchemeKind::Generic) {
        generic_scheme_rec(C, A, B, ctx, depth);
        return;
    }
    const std::size_t m2 = m & ~std::size_t(1), n2 = n & ~std::size_t(1),
                      p2 = p & ~std::size_t(1);
    BlockMul mul = [&](ElemView X, ConstElemView U, ConstElemView V) {
        fast_product_rec(X, U, V, ctx, depth + 1);
    };
    ElemView core = C.block(0, 0, m2, p2);
    ConstElemView Ae = A.block(0, 0, m2, n2), Be = B.block(0, 0, n2, p2);
    if (ctx.cfg.scheme == SchemeKind::Strassen)
        strassen_step(core, Ae, Be, ctx.F, mul, ctx.ops, ctx.ws,
                      static_cast<std::size_t>(depth));
    else
        winograd_step(core, Ae, Be, ctx.F, mul, ctx.ops, ctx.ws,
                      static_cast<std::size_t>(depth));
    if (m2 != m || n2 != n || p2 != p)
        peel_fixups(C, A, B, m2, n2, p2, +1, true, ctx, depth);
}

// C += sign * A*B with the two-temporary accumulation schedule: shared
// products are propagated between output quadrants by pre-mixing them, so
// no third buffer is needed.
void fast_acc_rec(ElemView C, ConstElemView A, ConstElemView B, int sign,
                  const FastCtx& ctx, int depth) {
    const std::size_t m = A.rows(), n = A.cols(), p = B.cols();
    if (use_classic(ctx, m, n, p, depth) ||
        ctx.cfg.scheme == SchemeKind::Generic) {
        mm_classic_into(C, A, B, ctx.F, ctx.ops, depth, ctx.cfg.mantissa_bits,
                        sign);
        return;
    }

    const std::size_t m2 = m & ~std::size_t(1), n2 = n & ~std::size_t(1),
                      p2 = p & ~std::size_t(1);
    const std::size_t mh = m2 / 2, nh = n2 / 2, ph = p2 / 2;
    ConstElemView A11 = A.block(0, 0, mh, nh), A12 = A.block(0, nh, mh, nh),
                  A21 = A.block(mh, 0, mh, nh), A22 = A.block(mh, nh, mh, nh);
    ConstElemView B11 = B.block(0, 0, nh, ph), B12 = B.block(0, ph, nh, ph),
                  B21 = B.block(nh, 0, nh, ph), B22 = B.block(nh, ph, nh, ph);
    ElemView C11 = C.block(0, 0, mh, ph), C12 = C.block(0, ph, mh, ph),
             C21 = C.block(mh, 0, mh, ph), C22 = C.block(mh, ph, mh, ph);

    const std::size_t s_elems = mh * nh, t_elems = nh * ph, c_elems = mh * ph;
    TempBuf xb(std::max(s_elems, c_elems)), yb(t_elems);
    if (ctx.ws)
        ctx.ws->note(static_cast<std::size_t>(depth), 2,
                     std::max({s_elems, t_elems, c_elems}));
    const PrimeField& F = ctx.F;
    OpCounter* ops = ctx.ops;

    auto acc = [&](ElemView D, ConstElemView U, ConstElemView V, int sg) {
        fast_acc_rec(D, U, V, sg, ctx, depth + 1);
    };

    ElemView Xp = xb.as(mh, ph);
    fast_product_rec(Xp, A11, B11, ctx, depth + 1);  // P1
    mat_acc_signed(C11, Xp, sign, F, ops);
    acc(C11, A12, B21, sign);                        // P2; C11 done
    mat_acc_signed(C12, Xp, sign, F, ops);
    mat_acc_signed(C21, Xp, sign, F, ops);
    mat_acc_signed(C22, Xp, sign, F, ops);
    ElemView Xs = xb.as(mh, nh);
    ElemView Yt = yb.as(nh, ph);
    mat_addsub(Xs, A21, A22, AddSub::Add, F, ops);   // S1
    mat_addsub(Yt, B12, B11, AddSub::Sub, F, ops);   // T1
    mat_addsub(C12, C12, C22, AddSub::Sub, F, ops);  // premix for P5
    acc(C22, Xs, Yt, sign);                          // P5
    mat_addsub(C12, C12, C22, AddSub::Add, F, ops);
    mat_addsub(Xs, Xs, A11, AddSub::Sub, F, ops);    // S2
    mat_addsub(Yt, B22, Yt, AddSub::Sub, F, ops);    // T2
    mat_addsub(C21, C21, C12, AddSub::Sub, F, ops);  // premix for P6
    mat_addsub(C22, C22, C12, AddSub::Sub, F, ops);
    acc(C12, Xs, Yt, sign);                          // P6
    mat_addsub(C21, C21, C12, AddSub::Add, F, ops);
    mat_addsub(C22, C22, C12, AddSub::Add, F, ops);
    mat_addsub(Xs, A12, Xs, AddSub::Sub, F, ops);    // S4
    acc(C12, Xs, B22, sign);                         // P3; C12 done
    mat_addsub(Yt, Yt, B21, AddSub::Sub, F, ops);    // T4
    acc(C21, A22, Yt, -sign);                        // -P4
    mat_addsub(Xs, A11, A21, AddSub::Sub, F, ops);   // S3
    mat_addsub(Yt, B22, B12, AddSub::Sub, F, ops);   // T3
    mat_addsub(C21, C21, C22, AddSub::Sub, F, ops);  // premix for P7
    acc(C22, Xs, Yt, sign);                          // P7; C22 done
    mat_addsub(C21, C21, C22, AddSub::Add, F, ops);  // C21 done

    if (m2 != m || n2 != n || p2 != p)
        peel_fixups(C, A, B, m2, n2, p2, sign, false, ctx, depth);
}

}  // namespace

ElemMat mm_fast(ConstElemView A, ConstElemView B, const PrimeField& F,
                const CascadeConfig& cfg, OpCounter* ops, WorkspaceStats* ws) {
    check_mm_dims(A, B);
    ElemMat C(A.rows(), B.cols());
    FastCtx ctx{F, cfg, ops, ws};
    fast_product_rec(C.view(), A, B, ctx, 0);
    return C;
}

void mm_fast_acc(ElemView C, ConstElemView A, ConstElemView B, int beta,
                 const PrimeField& F, const CascadeConfig& cfg, OpCounter* ops,
                 WorkspaceStats* ws) {
    check_mm_dims(A, B);
    if (C.rows() != A.rows() || C.cols() != B.cols())
        throw DimensionError("mm_fast_acc: output shape mismatch");
    if (beta != 0 && beta != 1 && beta != -1)
        throw DimensionError("mm_fast_acc: beta must be 0, 1 or -1");
    FastCtx ctx{F, cfg, ops, ws};
    if (beta == 0) {
        fast_product_rec(C, A, B, ctx, 0);
        return;
    }
    if (beta == -1) mat_negate(C, F, ops);
    fast_acc_rec(C, A, B, +1, ctx, 0);
}

ElemMat mm_parallel(ConstElemView A, ConstElemView B, const PrimeField& F,
                    const CascadeConfig& cfg, OpCounter* ops,
                    std::vector<char>* split_trace) {
    check_mm_dims(A, B);
    ElemMat C(A.rows(), B.cols());

    struct Leaf {
        ElemView c;
        ConstElemView a, b;
    };
    std::vector<Leaf> leaves;
    // Recursive binary split of the larger of A's row dimension and B's
    // column dimension, until enough independent tasks exist.
    std::function<void(ElemView, ConstElemView, ConstElemView, unsigned)> cut =
        [&](ElemView c, ConstElemView a, ConstElemView b, unsigned tasks) {
            if (tasks <= 1 || (a.rows() <= 1 && b.cols() <= 1)) {
                leaves.push_back({c, a, b});
                return;
            }
            unsigned left = (tasks + 1) / 2, right = tasks / 2;
            if (a.rows() >= b.cols() && a.rows() > 1) {
                if (split_trace) split_trace->push_back('R');
                std::size_t h = a.rows() / 2;
                cut(c.block(0, 0, h, c.cols()), a.block(0, 0, h, a.cols()), b,
                    left);
                cut(c.block(h, 0, c.rows() - h, c.cols()),
                    a.block(h, 0, a.rows() - h, a.cols()), b, right);
            } else {
                if (split_trace) split_trace->push_back('C');
                std::size_t h = b.cols() / 2;
                cut(c.block(0, 0, c.rows(), h), a, b.block(0, 0, b.rows(), h),
                    left);
                cut(c.block(0, h, c.rows(), c.cols() - h), a,
                    b.block(0, h, b.rows(), b.cols() - h), right);
            }
        };
    cut(C.view(), A, B, std::max(1u, cfg.parallel_tasks));

    std::vector<OpCounter> counts(leaves.size());
    std::vector<std::future<void>> jobs;
    jobs.reserve(leaves.size());
    for (std::size_t t = 0; t < leaves.size(); ++t) {
        jobs.push_back(std::async(std::launch::async, [&, t] {
            FastCtx ctx{F, cfg, ops ? &counts[t] : nullptr, nullptr};
            fast_product_rec(leaves[t].c, leaves[t].a, leaves[t].b, ctx, 0);
        }));
    }
    for (auto& j : jobs) j.get();
    if (ops)
        for (const auto& c : counts) *ops += c;
    return C;
}

}  // namespace ffmm
