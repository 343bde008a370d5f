#include "ffmm/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace ffmm {

// --------------------------------------------------------------------------
// Targets.
// --------------------------------------------------------------------------

TriTarget TriTarget::mm_trace(std::size_t m, std::size_t n, std::size_t p) {
    TriTarget t;
    t.nu = m * n;
    t.nv = n * p;
    t.nw = p * m;
    t.monomials.reserve(m * n * p);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k)
                t.monomials.push_back(
                    {i * n + j, j * p + k, k * m + i, +1});
    return t;
}

TriTarget TriTarget::disjoint_pair(std::size_t m, std::size_t n,
                                   std::size_t p) {
    PairIdx ix{m, n, p};
    TriTarget t;
    t.nu = m * n + n * p;
    t.nv = n * p + p * m;
    t.nw = p * m + m * n;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k) {
                t.monomials.push_back({ix.x(i, j), ix.y(j, k), ix.z(k, i), 1});
                t.monomials.push_back({ix.u(j, k), ix.v(k, i), ix.w(i, j), 1});
            }
    return t;
}

TriTarget TriTarget::disjoint_triple(std::size_t m, std::size_t n,
                                     std::size_t p) {
    TripleIdx ix{m, n, p};
    TriTarget t;
    t.nu = m * n + n * p + p * m;
    t.nv = t.nu;
    t.nw = t.nu;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k) {
                t.monomials.push_back({ix.x(i, j), ix.y(j, k), ix.z(k, i), 1});
                t.monomials.push_back({ix.u(j, k), ix.v(k, i), ix.w(i, j), 1});
                t.monomials.push_back({ix.a(k, i), ix.b(i, j), ix.c(j, k), 1});
            }
    return t;
}

// --------------------------------------------------------------------------
// BilinearScheme.
// --------------------------------------------------------------------------

BilinearScheme::BilinearScheme(std::size_t m, std::size_t n, std::size_t p,
                               QMat A, QMat B, QMat C, int schedule_additions)
    : is_mm_(true), m_(m), n_(n), p_(p), A_(std::move(A)), B_(std::move(B)),
      C_(std::move(C)), schedule_additions_(schedule_additions) {
    if (A_.rows() != B_.rows() || A_.rows() != C_.cols())
        throw SchemeError("scheme: rank mismatch between A, B, C");
    if (A_.cols() != m * n || B_.cols() != n * p || C_.rows() != m * p)
        throw SchemeError("scheme: coefficient shapes do not match m, n, p");
    target_ = TriTarget::mm_trace(m, n, p);
}

BilinearScheme::BilinearScheme(QMat A, QMat B, QMat C, TriTarget target,
                               int schedule_additions)
    : is_mm_(false), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)),
      target_(std::move(target)), schedule_additions_(schedule_additions) {
    if (A_.rows() != B_.rows() || A_.rows() != C_.cols())
        throw SchemeError("scheme: rank mismatch between A, B, C");
    if (A_.cols() != target_.nu || B_.cols() != target_.nv ||
        C_.rows() != target_.nw)
        throw SchemeError("scheme: coefficient shapes do not match target");
}

namespace {

std::int64_t rational_mod(const Rational& q, const PrimeField& F) {
    const std::int64_t p = F.modulus();
    std::uint64_t nu =
        mpz_fdiv_ui(q.get_num().get_mpz_t(), static_cast<unsigned long>(p));
    std::uint64_t de =
        mpz_fdiv_ui(q.get_den().get_mpz_t(), static_cast<unsigned long>(p));
    if (de == 0)
        throw NotInvertibleError("scheme coefficient denominator vanishes");
    std::int64_t n = F.reduce(static_cast<__int128>(nu));
    std::int64_t d = F.inv(F.reduce(static_cast<__int128>(de)));
    return F.mul(n, d);
}

std::vector<std::int64_t> qmat_mod(const QMat& M, const PrimeField& F) {
    std::vector<std::int64_t> out(M.rows() * M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            out[i * M.cols() + j] = rational_mod(M(i, j), F);
    return out;
}

}  // namespace

const BilinearScheme::ModCache& BilinearScheme::cache_for(
    const PrimeField& F) const {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(F.modulus());
    if (it == cache_.end()) {
        auto c = std::make_shared<ModCache>();
        c->alpha = qmat_mod(A_, F);
        c->beta = qmat_mod(B_, F);
        c->gamma = qmat_mod(C_, F);
        it = cache_.emplace(F.modulus(), std::move(c)).first;
    }
    return *it->second;
}

const std::vector<std::int64_t>& BilinearScheme::alpha_mod(
    const PrimeField& F) const {
    return cache_for(F).alpha;
}
const std::vector<std::int64_t>& BilinearScheme::beta_mod(
    const PrimeField& F) const {
    return cache_for(F).beta;
}
const std::vector<std::int64_t>& BilinearScheme::gamma_mod(
    const PrimeField& F) const {
    return cache_for(F).gamma;
}

// --------------------------------------------------------------------------
// Verification by exact symbolic expansion.
// --------------------------------------------------------------------------

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::size_t>;

std::map<Key, Rational> target_map(const TriTarget& t) {
    std::map<Key, Rational> m;
    for (const auto& mono : t.monomials) {
        Rational& c = m[{mono.a, mono.b, mono.c}];
        c += mono.sign;
        if (c == 0) m.erase({mono.a, mono.b, mono.c});
    }
    return m;
}

template <typename Coeff, typename MatT>
std::map<Key, Coeff> expand_products(const MatT& F1, const MatT& F2,
                                     const MatT& F3) {
    std::map<Key, Coeff> acc;
    const std::size_t r = F1.rows();
    for (std::size_t q = 0; q < r; ++q) {
        for (std::size_t a = 0; a < F1.cols(); ++a) {
            const Coeff& ca = F1(q, a);
            if (ca == Coeff(0)) continue;
            for (std::size_t b = 0; b < F2.cols(); ++b) {
                const Coeff& cb = F2(q, b);
                if (cb == Coeff(0)) continue;
                Coeff cab = ca * cb;
                for (std::size_t c = 0; c < F3.cols(); ++c) {
                    const Coeff& cc = F3(q, c);
                    if (cc == Coeff(0)) continue;
                    Coeff& slot = acc[{a, b, c}];
                    slot = slot + cab * cc;
                    if (slot == Coeff(0)) acc.erase({a, b, c});
                }
            }
        }
    }
    return acc;
}

}  // namespace

bool trilinear_verify(const TrilinearScheme& t) {
    auto exp = expand_products<Rational>(t.F1, t.F2, t.F3);
    return exp == target_map(t.target);
}

bool brent_verify(const BilinearScheme& s, std::array<std::size_t, 3>* fail) {
    // Expansion of the scheme read as a trilinear decomposition; comparing
    // against the target monomial map is the coefficient-matching identity.
    TrilinearScheme t = bilinear_to_trilinear(s);
    auto exp = expand_products<Rational>(t.F1, t.F2, t.F3);
    auto tgt = target_map(t.target);
    if (exp == tgt) return true;
    if (fail) {
        for (const auto& [k, v] : exp) {
            auto it = tgt.find(k);
            if (it == tgt.end() || it->second != v) {
                *fail = {std::get<0>(k), std::get<1>(k), std::get<2>(k)};
                return false;
            }
        }
        for (const auto& [k, v] : tgt) {
            if (!exp.count(k)) {
                *fail = {std::get<0>(k), std::get<1>(k), std::get<2>(k)};
                return false;
            }
        }
    }
    return false;
}

bool apa_verify(const ApaScheme& a) {
    auto exp = expand_products<LaurentPoly>(a.F1, a.F2, a.F3);
    auto tgt = target_map(a.target);
    for (auto& [k, poly] : exp) {
        LaurentPoly want;
        auto it = tgt.find(k);
        if (it != tgt.end()) want = LaurentPoly(it->second);
        LaurentPoly rest = poly - want;
        if (!rest.is_zero() && rest.min_power() < 1) return false;
    }
    // Target monomials absent from the expansion are failures.
    for (const auto& [k, v] : tgt)
        if (!exp.count(k)) return false;
    return true;
}

// --------------------------------------------------------------------------
// Application.
// --------------------------------------------------------------------------

std::vector<std::int64_t> apply_scheme_vec(const BilinearScheme& s,
                                           const std::vector<std::int64_t>& u,
                                           const std::vector<std::int64_t>& v,
                                           const PrimeField& F,
                                           OpCounter* ops) {
    if (u.size() != s.nu() || v.size() != s.nv())
        throw DimensionError("apply_scheme: input sizes do not match scheme");
    const auto& alpha = s.alpha_mod(F);
    const auto& beta = s.beta_mod(F);
    const auto& gamma = s.gamma_mod(F);
    const std::size_t r = s.rank(), nu = s.nu(), nv = s.nv(), nx = s.nx();
    std::vector<std::int64_t> x(nx, 0);
    for (std::size_t q = 0; q < r; ++q) {
        std::int64_t lu = 0, lv = 0;
        for (std::size_t a = 0; a < nu; ++a) {
            std::int64_t c = alpha[q * nu + a];
            if (c == 0) continue;
            lu = F.add(lu, c == 1 ? u[a] : c == -1 ? F.neg(u[a])
                                                   : F.mul(c, u[a]));
            if (ops) ops->adds++;
        }
        for (std::size_t b = 0; b < nv; ++b) {
            std::int64_t c = beta[q * nv + b];
            if (c == 0) continue;
            lv = F.add(lv, c == 1 ? v[b] : c == -1 ? F.neg(v[b])
                                                   : F.mul(c, v[b]));
            if (ops) ops->adds++;
        }
        std::int64_t prod = F.mul(lu, lv);
        if (ops) {
            ops->mults++;
            ops->reductions++;
        }
        for (std::size_t o = 0; o < nx; ++o) {
            std::int64_t c = gamma[o * r + q];
            if (c == 0) continue;
            x[o] = F.add(x[o], c == 1 ? prod : c == -1 ? F.neg(prod)
                                                       : F.mul(c, prod));
            if (ops) ops->adds++;
        }
    }
    return x;
}

ElemMat apply_scheme(const BilinearScheme& s, ConstElemView U,
                     ConstElemView V, const PrimeField& F, OpCounter* ops) {
    if (!s.is_mm())
        throw SchemeError("apply_scheme: matrix form requires an MM scheme");
    if (U.rows() != s.m() || U.cols() != s.n() || V.rows() != s.n() ||
        V.cols() != s.p())
        throw DimensionError("apply_scheme: operand shapes do not match");
    std::vector<std::int64_t> u(s.nu()), v(s.nv());
    for (std::size_t i = 0; i < s.m(); ++i)
        for (std::size_t j = 0; j < s.n(); ++j) u[i * s.n() + j] = U(i, j);
    for (std::size_t j = 0; j < s.n(); ++j)
        for (std::size_t k = 0; k < s.p(); ++k) v[j * s.p() + k] = V(j, k);
    std::vector<std::int64_t> x = apply_scheme_vec(s, u, v, F, ops);
    ElemMat X(s.m(), s.p());
    for (std::size_t i = 0; i < s.m(); ++i)
        for (std::size_t k = 0; k < s.p(); ++k) X(i, k) = x[i * s.p() + k];
    return X;
}

// --------------------------------------------------------------------------
// Conversions and duality.
// --------------------------------------------------------------------------

TrilinearScheme bilinear_to_trilinear(const BilinearScheme& s) {
    TrilinearScheme t;
    t.F1 = s.A();
    t.F2 = s.B();
    const std::size_t r = s.rank();
    if (s.is_mm()) {
        const std::size_t m = s.m(), p = s.p();
        t.F3 = QMat(r, p * m);
        for (std::size_t q = 0; q < r; ++q)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = 0; k < p; ++k)
                    t.F3(q, k * m + i) = s.C()(i * p + k, q);
        t.target = TriTarget::mm_trace(m, s.n(), p);
        t.mm_dims = {{m, s.n(), p}};
    } else {
        t.F3 = QMat(r, s.nx());
        for (std::size_t q = 0; q < r; ++q)
            for (std::size_t o = 0; o < s.nx(); ++o) t.F3(q, o) = s.C()(o, q);
        t.target = s.target();
    }
    return t;
}

namespace {

TrilinearScheme rotate_tri(const TrilinearScheme& t) {
    TrilinearScheme r;
    r.F1 = t.F2;
    r.F2 = t.F3;
    r.F3 = t.F1;
    r.target.nu = t.target.nv;
    r.target.nv = t.target.nw;
    r.target.nw = t.target.nu;
    for (const auto& mono : t.target.monomials)
        r.target.monomials.push_back({mono.b, mono.c, mono.a, mono.sign});
    if (t.mm_dims)
        r.mm_dims = {{(*t.mm_dims)[1], (*t.mm_dims)[2], (*t.mm_dims)[0]}};
    return r;
}

}  // namespace

BilinearScheme trilinear_to_bilinear(const TrilinearScheme& t, TriRole role) {
    // Rotating once moves the U forms into the W slot, so equating the
    // coefficients of the requested role is always a W extraction.
    TrilinearScheme w = role == TriRole::W ? t
                        : role == TriRole::U ? rotate_tri(t)
                                             : rotate_tri(rotate_tri(t));
    const std::size_t r = w.F1.rows();
    if (w.mm_dims) {
        const std::size_t m = (*w.mm_dims)[0], n = (*w.mm_dims)[1],
                          p = (*w.mm_dims)[2];
        QMat C(m * p, r);
        for (std::size_t q = 0; q < r; ++q)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t k = 0; k < p; ++k)
                    C(i * p + k, q) = w.F3(q, k * m + i);
        return BilinearScheme(m, n, p, w.F1, w.F2, std::move(C));
    }
    QMat C(w.F3.cols(), r);
    for (std::size_t q = 0; q < r; ++q)
        for (std::size_t o = 0; o < w.F3.cols(); ++o) C(o, q) = w.F3(q, o);
    return BilinearScheme(w.F1, w.F2, std::move(C), w.target);
}

namespace {

// trace(UVW) = trace((UVW)^T) = trace(W^T V^T U^T): transpose every index
// pair and reverse the factor order.  Requires a single-trace target.
TrilinearScheme transpose_tri(const TrilinearScheme& t) {
    if (!t.mm_dims)
        throw SchemeError("transpose requires a matrix-trace target");
    const std::size_t m = (*t.mm_dims)[0], n = (*t.mm_dims)[1],
                      p = (*t.mm_dims)[2];
    const std::size_t r = t.F1.rows();
    TrilinearScheme s;
    s.mm_dims = {{m, p, n}};
    s.target = TriTarget::mm_trace(m, p, n);
    s.F1 = QMat(r, m * p);  // entries of W^T, an m x p factor
    s.F2 = QMat(r, p * n);  // entries of V^T
    s.F3 = QMat(r, n * m);  // entries of U^T
    for (std::size_t q = 0; q < r; ++q) {
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t i = 0; i < m; ++i)
                s.F1(q, i * p + k) = t.F3(q, k * m + i);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k)
                s.F2(q, k * n + j) = t.F2(q, j * p + k);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s.F3(q, j * m + i) = t.F1(q, i * n + j);
    }
    return s;
}

}  // namespace

BilinearScheme dualize(const BilinearScheme& s, DualPerm perm) {
    if (!s.is_mm()) throw SchemeError("dualize requires an MM scheme");
    TrilinearScheme t = bilinear_to_trilinear(s);
    switch (perm) {
        case DualPerm::Identity:
            break;
        case DualPerm::RotateLeft:
            t = rotate_tri(t);
            break;
        case DualPerm::RotateRight:
            t = rotate_tri(rotate_tri(t));
            break;
        case DualPerm::Transpose:
            t = transpose_tri(t);
            break;
        case DualPerm::TransposeLeft:
            t = transpose_tri(rotate_tri(rotate_tri(t)));
            break;
        case DualPerm::TransposeRight:
            t = transpose_tri(rotate_tri(t));
            break;
    }
    return trilinear_to_bilinear(t, TriRole::W);
}

// --------------------------------------------------------------------------
// Canonical form.
// --------------------------------------------------------------------------

namespace {

// Scale a row to a primitive integer vector with positive leading nonzero;
// returns the factor the row was divided by.
Rational normalize_row(std::vector<Rational>& row) {
    BigInt l(1), g(0);
    for (const auto& c : row)
        if (c != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(),
                            c.get_den().get_mpz_t());
    int lead_sign = 0;
    for (const auto& c : row) {
        if (c == 0) continue;
        BigInt num = c.get_num() * (l / c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
        if (lead_sign == 0) lead_sign = sgn(num) >= 0 ? 1 : -1;
    }
    if (g == 0) return Rational(1);  // zero row
    Rational factor(g * lead_sign, l);
    factor.canonicalize();
    for (auto& c : row) {
        c /= factor;
        c.canonicalize();
    }
    return factor;
}

}  // namespace

BilinearScheme canonical_form(const BilinearScheme& s) {
    const std::size_t r = s.rank(), nu = s.nu(), nv = s.nv(), nx = s.nx();
    struct Term {
        std::vector<Rational> a, b, c;
    };
    std::vector<Term> terms(r);
    for (std::size_t q = 0; q < r; ++q) {
        terms[q].a.resize(nu);
        terms[q].b.resize(nv);
        terms[q].c.resize(nx);
        for (std::size_t i = 0; i < nu; ++i) terms[q].a[i] = s.A()(q, i);
        for (std::size_t i = 0; i < nv; ++i) terms[q].b[i] = s.B()(q, i);
        for (std::size_t i = 0; i < nx; ++i) terms[q].c[i] = s.C()(i, q);
        Rational fa = normalize_row(terms[q].a);
        Rational fb = normalize_row(terms[q].b);
        for (auto& c : terms[q].c) {
            c *= fa * fb;
            c.canonicalize();
        }
    }
    auto veccmp = [](const std::vector<Rational>& x,
                     const std::vector<Rational>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            int c = cmp(x[i], y[i]);
            if (c != 0) return c;
        }
        return 0;
    };
    std::sort(terms.begin(), terms.end(), [&](const Term& t1, const Term& t2) {
        int c = veccmp(t1.a, t2.a);
        if (c != 0) return c < 0;
        c = veccmp(t1.b, t2.b);
        if (c != 0) return c < 0;
        return veccmp(t1.c, t2.c) < 0;
    });
    QMat A(r, nu), B(r, nv), C(nx, r);
    for (std::size_t q = 0; q < r; ++q) {
        for (std::size_t i = 0; i < nu; ++i) A(q, i) = terms[q].a[i];
        for (std::size_t i = 0; i < nv; ++i) B(q, i) = terms[q].b[i];
        for (std::size_t i = 0; i < nx; ++i) C(i, q) = terms[q].c[i];
    }
    if (s.is_mm())
        return BilinearScheme(s.m(), s.n(), s.p(), std::move(A), std::move(B),
                              std::move(C), s.schedule_additions());
    return BilinearScheme(std::move(A), std::move(B), std::move(C), s.target(),
                          s.schedule_additions());
}

bool scheme_equal(const BilinearScheme& a, const BilinearScheme& b) {
    if (a.rank() != b.rank() || a.nu() != b.nu() || a.nv() != b.nv() ||
        a.nx() != b.nx())
        return false;
    BilinearScheme ca = canonical_form(a), cb = canonical_form(b);
    return ca.A() == cb.A() && ca.B() == cb.B() && ca.C() == cb.C();
}

// --------------------------------------------------------------------------
// Exponents.
// --------------------------------------------------------------------------

double exponent_of(std::size_t m, std::size_t n, std::size_t p,
                   std::size_t r) {
    if (m * n * p <= 1)
        throw std::domain_error("exponent_of: mnp must exceed 1");
    if (r < 1) throw std::domain_error("exponent_of: rank must be positive");
    return 3.0 * std::log(static_cast<double>(r)) /
           std::log(static_cast<double>(m) * n * p);
}

double apa_exponent(std::size_t m, std::size_t n, std::size_t p,
                    std::size_t border_rank, std::size_t disjoint_count) {
    if (disjoint_count < 1)
        throw std::domain_error("apa_exponent: need at least one problem");
    if (m * n * p <= 1)
        throw std::domain_error("apa_exponent: mnp must exceed 1");
    if (border_rank <= disjoint_count)
        throw std::domain_error("apa_exponent: degenerate border rank");
    return 3.0 *
           std::log(static_cast<double>(border_rank) / disjoint_count) /
           std::log(static_cast<double>(m) * n * p);
}

// --------------------------------------------------------------------------
// Aggregation generators.
// --------------------------------------------------------------------------

TrilinearScheme agg_pair_scheme(std::size_t m, std::size_t n, std::size_t p) {
    PairIdx ix{m, n, p};
    const std::size_t rank = m * n * p + m * n + n * p + p * m;
    TrilinearScheme t;
    t.target = TriTarget::disjoint_pair(m, n, p);
    t.F1 = QMat(rank, t.target.nu);
    t.F2 = QMat(rank, t.target.nv);
    t.F3 = QMat(rank, t.target.nw);
    std::size_t q = 0;
    // Aggregates (x_ij + u_jk)(y_jk + v_ki)(z_ki + w_ij).
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k, ++q) {
                t.F1(q, ix.x(i, j)) = 1;
                t.F1(q, ix.u(j, k)) = 1;
                t.F2(q, ix.y(j, k)) = 1;
                t.F2(q, ix.v(k, i)) = 1;
                t.F3(q, ix.z(k, i)) = 1;
                t.F3(q, ix.w(i, j)) = 1;
            }
    // T1: x_ij * s_ij * w_ij with s_ij = sum_k (y_jk + v_ki).
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j, ++q) {
            t.F1(q, ix.x(i, j)) = 1;
            for (std::size_t k = 0; k < p; ++k) {
                t.F2(q, ix.y(j, k)) += 1;
                t.F2(q, ix.v(k, i)) += 1;
            }
            t.F3(q, ix.w(i, j)) = -1;
        }
    // T2: u_jk * y_jk * r_jk with r_jk = sum_i (z_ki + w_ij).
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < p; ++k, ++q) {
            t.F1(q, ix.u(j, k)) = 1;
            t.F2(q, ix.y(j, k)) = 1;
            for (std::size_t i = 0; i < m; ++i) {
                t.F3(q, ix.z(k, i)) += -1;
                t.F3(q, ix.w(i, j)) += -1;
            }
        }
    // T3: q_ki * v_ki * z_ki with q_ki = sum_j (x_ij + u_jk).
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t i = 0; i < m; ++i, ++q) {
            for (std::size_t j = 0; j < n; ++j) {
                t.F1(q, ix.x(i, j)) += -1;
                t.F1(q, ix.u(j, k)) += -1;
            }
            t.F2(q, ix.v(k, i)) = 1;
            t.F3(q, ix.z(k, i)) = 1;
        }
    return t;
}

namespace {

// Tensor (block) product of two single-trace decompositions.
TrilinearScheme tensor_tri(const TrilinearScheme& s, const TrilinearScheme& t) {
    if (!s.mm_dims || !t.mm_dims)
        throw SchemeError("tensor product requires matrix-trace schemes");
    const std::size_t m1 = (*s.mm_dims)[0], n1 = (*s.mm_dims)[1],
                      p1 = (*s.mm_dims)[2];
    const std::size_t m2 = (*t.mm_dims)[0], n2 = (*t.mm_dims)[1],
                      p2 = (*t.mm_dims)[2];
    const std::size_t m = m1 * m2, n = n1 * n2, p = p1 * p2;
    const std::size_t r1 = s.rank(), r2 = t.rank();
    TrilinearScheme out;
    out.mm_dims = {{m, n, p}};
    out.target = TriTarget::mm_trace(m, n, p);
    out.F1 = QMat(r1 * r2, m * n);
    out.F2 = QMat(r1 * r2, n * p);
    out.F3 = QMat(r1 * r2, p * m);
    for (std::size_t q1 = 0; q1 < r1; ++q1)
        for (std::size_t q2 = 0; q2 < r2; ++q2) {
            const std::size_t q = q1 * r2 + q2;
            for (std::size_t i1 = 0; i1 < m1; ++i1)
                for (std::size_t j1 = 0; j1 < n1; ++j1) {
                    const Rational& c1 = s.F1(q1, i1 * n1 + j1);
                    if (c1 == 0) continue;
                    for (std::size_t i2 = 0; i2 < m2; ++i2)
                        for (std::size_t j2 = 0; j2 < n2; ++j2) {
                            const Rational& c2 = t.F1(q2, i2 * n2 + j2);
                            if (c2 == 0) continue;
                            out.F1(q, (i1 * m2 + i2) * n + (j1 * n2 + j2)) =
                                c1 * c2;
                        }
                }
            for (std::size_t j1 = 0; j1 < n1; ++j1)
                for (std::size_t k1 = 0; k1 < p1; ++k1) {
                    const Rational& c1 = s.F2(q1, j1 * p1 + k1);
                    if (c1 == 0) continue;
                    for (std::size_t j2 = 0; j2 < n2; ++j2)
                        for (std::size_t k2 = 0; k2 < p2; ++k2) {
                            const Rational& c2 = t.F2(q2, j2 * p2 + k2);
                            if (c2 == 0) continue;
                            out.F2(q, (j1 * n2 + j2) * p + (k1 * p2 + k2)) =
                                c1 * c2;
                        }
                }
            for (std::size_t k1 = 0; k1 < p1; ++k1)
                for (std::size_t i1 = 0; i1 < m1; ++i1) {
                    const Rational& c1 = s.F3(q1, k1 * m1 + i1);
                    if (c1 == 0) continue;
                    for (std::size_t k2 = 0; k2 < p2; ++k2)
                        for (std::size_t i2 = 0; i2 < m2; ++i2) {
                            const Rational& c2 = t.F3(q2, k2 * m2 + i2);
                            if (c2 == 0) continue;
                            out.F3(q, (k1 * p2 + k2) * m + (i1 * m2 + i2)) =
                                c1 * c2;
                        }
                }
        }
    return out;
}

}  // namespace

TrilinearScheme mm_trace_scheme(std::size_t m, std::size_t n, std::size_t p) {
    if (m % 2 == 0 && n % 2 == 0 && p % 2 == 0)
        return tensor_tri(trilinear_mm2_scheme(),
                          mm_trace_scheme(m / 2, n / 2, p / 2));
    TrilinearScheme t;
    t.mm_dims = {{m, n, p}};
    t.target = TriTarget::mm_trace(m, n, p);
    const std::size_t r = m * n * p;
    t.F1 = QMat(r, m * n);
    t.F2 = QMat(r, n * p);
    t.F3 = QMat(r, p * m);
    std::size_t q = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k, ++q) {
                t.F1(q, i * n + j) = 1;
                t.F2(q, j * p + k) = 1;
                t.F3(q, k * m + i) = 1;
            }
    return t;
}

TrilinearScheme agg_triple_scheme(std::size_t m, std::size_t n,
                                  std::size_t p) {
    TripleIdx ix{m, n, p};
    TrilinearScheme t;
    t.target = TriTarget::disjoint_triple(m, n, p);

    // Parasite traces generated by the all-plus aggregates: the off-diagonal
    // alignments of the table contribute trace(XCV) + trace(UZB) + trace(AWY)
    // on top of the three wanted traces; each is a full matrix-multiplication
    // tensor and is subtracted through an explicit exact decomposition.
    TrilinearScheme d1 = mm_trace_scheme(m, n, p);  // x, c, v roles
    TrilinearScheme d2 = mm_trace_scheme(n, p, m);  // u, z, b roles
    TrilinearScheme d3 = mm_trace_scheme(p, m, n);  // a, w, y roles

    const std::size_t rank = m * n * p + 3 * (m * n + n * p + p * m) +
                             d1.rank() + d2.rank() + d3.rank();
    t.F1 = QMat(rank, t.target.nu);
    t.F2 = QMat(rank, t.target.nv);
    t.F3 = QMat(rank, t.target.nw);
    std::size_t q = 0;

    // Aggregates (x_ij + u_jk + a_ki)(y_jk + v_ki + b_ij)(z_ki + w_ij + c_jk).
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k, ++q) {
                t.F1(q, ix.x(i, j)) = 1;
                t.F1(q, ix.u(j, k)) = 1;
                t.F1(q, ix.a(k, i)) = 1;
                t.F2(q, ix.y(j, k)) = 1;
                t.F2(q, ix.v(k, i)) = 1;
                t.F2(q, ix.b(i, j)) = 1;
                t.F3(q, ix.z(k, i)) = 1;
                t.F3(q, ix.w(i, j)) = 1;
                t.F3(q, ix.c(j, k)) = 1;
            }

    // Batched corrections, three per index-pair class.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // x * sum_k(y + v + b) * (-w)
            t.F1(q, ix.x(i, j)) = 1;
            for (std::size_t k = 0; k < p; ++k) {
                t.F2(q, ix.y(j, k)) += 1;
                t.F2(q, ix.v(k, i)) += 1;
                t.F2(q, ix.b(i, j)) += 1;
            }
            t.F3(q, ix.w(i, j)) = -1;
            ++q;
            // x * b * -(sum_k(z + c))
            t.F1(q, ix.x(i, j)) = 1;
            t.F2(q, ix.b(i, j)) = 1;
            for (std::size_t k = 0; k < p; ++k) {
                t.F3(q, ix.z(k, i)) += -1;
                t.F3(q, ix.c(j, k)) += -1;
            }
            ++q;
            // sum_k(u + a) * b * (-w)
            for (std::size_t k = 0; k < p; ++k) {
                t.F1(q, ix.u(j, k)) += 1;
                t.F1(q, ix.a(k, i)) += 1;
            }
            t.F2(q, ix.b(i, j)) = 1;
            t.F3(q, ix.w(i, j)) = -1;
            ++q;
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < p; ++k) {
            // u * y * -(sum_i(z + w + c))
            t.F1(q, ix.u(j, k)) = 1;
            t.F2(q, ix.y(j, k)) = 1;
            for (std::size_t i = 0; i < m; ++i) {
                t.F3(q, ix.z(k, i)) += -1;
                t.F3(q, ix.w(i, j)) += -1;
                t.F3(q, ix.c(j, k)) += -1;
            }
            ++q;
            // u * sum_i(v + b) * (-c)
            t.F1(q, ix.u(j, k)) = 1;
            for (std::size_t i = 0; i < m; ++i) {
                t.F2(q, ix.v(k, i)) += 1;
                t.F2(q, ix.b(i, j)) += 1;
            }
            t.F3(q, ix.c(j, k)) = -1;
            ++q;
            // sum_i(x + a) * y * (-c)
            for (std::size_t i = 0; i < m; ++i) {
                t.F1(q, ix.x(i, j)) += 1;
                t.F1(q, ix.a(k, i)) += 1;
            }
            t.F2(q, ix.y(j, k)) = 1;
            t.F3(q, ix.c(j, k)) = -1;
            ++q;
        }
    for (std::size_t k = 0; k < p; ++k)
        for (std::size_t i = 0; i < m; ++i) {
            // a * v * -(sum_j(z + w + c))
            t.F1(q, ix.a(k, i)) = 1;
            t.F2(q, ix.v(k, i)) = 1;
            for (std::size_t j = 0; j < n; ++j) {
                t.F3(q, ix.z(k, i)) += -1;
                t.F3(q, ix.w(i, j)) += -1;
                t.F3(q, ix.c(j, k)) += -1;
            }
            ++q;
            // a * sum_j(y + b) * (-z)
            t.F1(q, ix.a(k, i)) = 1;
            for (std::size_t j = 0; j < n; ++j) {
                t.F2(q, ix.y(j, k)) += 1;
                t.F2(q, ix.b(i, j)) += 1;
            }
            t.F3(q, ix.z(k, i)) = -1;
            ++q;
            // sum_j(x + u) * v * (-z)
            for (std::size_t j = 0; j < n; ++j) {
                t.F1(q, ix.x(i, j)) += 1;
                t.F1(q, ix.u(j, k)) += 1;
            }
            t.F2(q, ix.v(k, i)) = 1;
            t.F3(q, ix.z(k, i)) = -1;
            ++q;
        }

    // Parasite subtraction: trace(XCV), roles (x -> col1, c -> col3, v -> col2).
    for (std::size_t dq = 0; dq < d1.rank(); ++dq, ++q) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t.F1(q, ix.x(i, j)) = d1.F1(dq, i * n + j);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k)
                t.F3(q, ix.c(j, k)) = -d1.F2(dq, j * p + k);
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t i = 0; i < m; ++i)
                t.F2(q, ix.v(k, i)) = d1.F3(dq, k * m + i);
    }
    // trace(UZB), roles (u -> col1, z -> col3, b -> col2).
    for (std::size_t dq = 0; dq < d2.rank(); ++dq, ++q) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k)
                t.F1(q, ix.u(j, k)) = d2.F1(dq, j * p + k);
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t i = 0; i < m; ++i)
                t.F3(q, ix.z(k, i)) = -d2.F2(dq, k * m + i);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t.F2(q, ix.b(i, j)) = d2.F3(dq, i * n + j);
    }
    // trace(AWY), roles (a -> col1, w -> col3, y -> col2).
    for (std::size_t dq = 0; dq < d3.rank(); ++dq, ++q) {
        for (std::size_t k = 0; k < p; ++k)
            for (std::size_t i = 0; i < m; ++i)
                t.F1(q, ix.a(k, i)) = d3.F1(dq, k * m + i);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                t.F3(q, ix.w(i, j)) = -d3.F2(dq, i * n + j);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k)
                t.F2(q, ix.y(j, k)) = d3.F3(dq, j * p + k);
    }
    return t;
}

// --------------------------------------------------------------------------
// APA constructions.
// --------------------------------------------------------------------------

ApaScheme apa_pair_scheme(std::size_t m, std::size_t n, std::size_t p) {
    PairIdx ix{m, n, p};
    const std::size_t rank = m * n * p + m * n + n * p;
    ApaScheme a;
    a.target = TriTarget::disjoint_pair(m, n, p);
    a.F1 = LMat(rank, a.target.nu);
    a.F2 = LMat(rank, a.target.nv);
    a.F3 = LMat(rank, a.target.nw);
    const LaurentPoly one(Rational(1));
    const LaurentPoly lam = LaurentPoly::term(1, 1);
    std::size_t q = 0;
    // Aggregates lambda^-2 (x + lambda u)(y + lambda v)(lambda^2 z + w);
    // the lambda^-2 prefactor is folded into the third linear form.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < p; ++k, ++q) {
                a.F1(q, ix.x(i, j)) = one;
                a.F1(q, ix.u(j, k)) = lam;
                a.F2(q, ix.y(j, k)) = one;
                a.F2(q, ix.v(k, i)) = lam;
                a.F3(q, ix.z(k, i)) = one;
                a.F3(q, ix.w(i, j)) = LaurentPoly::term(1, -2);
            }
    // T1: lambda^-2 x_ij sum_k(y + lambda v) w_ij, subtracted.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j, ++q) {
            a.F1(q, ix.x(i, j)) = one;
            for (std::size_t k = 0; k < p; ++k) {
                a.F2(q, ix.y(j, k)) = a.F2(q, ix.y(j, k)) + one;
                a.F2(q, ix.v(k, i)) = a.F2(q, ix.v(k, i)) + lam;
            }
            a.F3(q, ix.w(i, j)) = LaurentPoly::term(-1, -2);
        }
    // T2: lambda^-1 u_jk y_jk sum_i(lambda^2 z + w), subtracted.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < p; ++k, ++q) {
            a.F1(q, ix.u(j, k)) = one;
            a.F2(q, ix.y(j, k)) = one;
            for (std::size_t i = 0; i < m; ++i) {
                a.F3(q, ix.z(k, i)) =
                    a.F3(q, ix.z(k, i)) + LaurentPoly::term(-1, 1);
                a.F3(q, ix.w(i, j)) =
                    a.F3(q, ix.w(i, j)) + LaurentPoly::term(-1, -1);
            }
        }
    return a;
}

ApaScheme apa_from_trilinear(const TrilinearScheme& t) {
    ApaScheme a;
    a.target = t.target;
    a.mm_dims = t.mm_dims;
    a.F1 = LMat(t.F1.rows(), t.F1.cols());
    a.F2 = LMat(t.F2.rows(), t.F2.cols());
    a.F3 = LMat(t.F3.rows(), t.F3.cols());
    for (std::size_t q = 0; q < t.rank(); ++q) {
        for (std::size_t i = 0; i < t.F1.cols(); ++i)
            a.F1(q, i) = LaurentPoly(t.F1(q, i));
        for (std::size_t i = 0; i < t.F2.cols(); ++i)
            a.F2(q, i) = LaurentPoly(t.F2(q, i));
        for (std::size_t i = 0; i < t.F3.cols(); ++i)
            a.F3(q, i) = LaurentPoly(t.F3(q, i));
    }
    return a;
}

int ApaScheme::degree() const {
    int d = 0;
    auto row_powers = [](const LMat& M, std::size_t q, int& lo, int& hi) {
        bool any = false;
        for (std::size_t i = 0; i < M.cols(); ++i) {
            const LaurentPoly& c = M(q, i);
            if (c.is_zero()) continue;
            if (!any) {
                lo = c.min_power();
                hi = c.max_power();
                any = true;
            } else {
                lo = std::min(lo, c.min_power());
                hi = std::max(hi, c.max_power());
            }
        }
        if (!any) lo = hi = 0;
    };
    for (std::size_t q = 0; q < border_rank(); ++q) {
        int l1, h1, l2, h2, l3, h3;
        row_powers(F1, q, l1, h1);
        row_powers(F2, q, l2, h2);
        row_powers(F3, q, l3, h3);
        d = std::max(d, std::abs(l1 + l2 + l3));
        d = std::max(d, std::abs(h1 + h2 + h3));
    }
    return d;
}

TrilinearScheme apa_to_exact(const ApaScheme& a) {
    const int d = a.degree();
    const int npts = 2 * d + 1;
    // Interpolation weights: sum_t c_t lambda_t^e = [e == 0] for |e| <= d.
    std::vector<Rational> pts(npts);
    for (int t = 0; t < npts; ++t) pts[t] = Rational(t + 1);
    // Dense Gaussian elimination on the (2d+1)^2 rational system.
    const int nsys = npts;
    std::vector<std::vector<Rational>> M(nsys,
                                         std::vector<Rational>(nsys + 1));
    for (int row = 0; row < nsys; ++row) {
        int e = row - d;
        for (int t = 0; t < nsys; ++t) {
            Rational v = 1;
            for (int i = 0; i < std::abs(e); ++i) v *= pts[t];
            M[row][t] = e >= 0 ? v : Rational(1) / v;
        }
        M[row][nsys] = (e == 0) ? 1 : 0;
    }
    for (int col = 0; col < nsys; ++col) {
        int piv = col;
        while (piv < nsys && M[piv][col] == 0) ++piv;
        if (piv == nsys)
            throw SchemeError("apa interpolation system is singular");
        std::swap(M[col], M[piv]);
        for (int row = 0; row < nsys; ++row) {
            if (row == col || M[row][col] == 0) continue;
            Rational f = M[row][col] / M[col][col];
            for (int t = col; t <= nsys; ++t) M[row][t] -= f * M[col][t];
        }
    }
    std::vector<Rational> weight(nsys);
    for (int t = 0; t < nsys; ++t) weight[t] = M[t][nsys] / M[t][t];

    const std::size_t r = a.border_rank();
    TrilinearScheme out;
    out.target = a.target;
    out.mm_dims = a.mm_dims;
    out.F1 = QMat(static_cast<std::size_t>(npts) * r, a.F1.cols());
    out.F2 = QMat(static_cast<std::size_t>(npts) * r, a.F2.cols());
    out.F3 = QMat(static_cast<std::size_t>(npts) * r, a.F3.cols());
    for (int t = 0; t < npts; ++t) {
        for (std::size_t q = 0; q < r; ++q) {
            const std::size_t row = static_cast<std::size_t>(t) * r + q;
            for (std::size_t i = 0; i < a.F1.cols(); ++i)
                if (!a.F1(q, i).is_zero())
                    out.F1(row, i) = a.F1(q, i).eval(pts[t]);
            for (std::size_t i = 0; i < a.F2.cols(); ++i)
                if (!a.F2(q, i).is_zero())
                    out.F2(row, i) = a.F2(q, i).eval(pts[t]);
            for (std::size_t i = 0; i < a.F3.cols(); ++i)
                if (!a.F3(q, i).is_zero())
                    out.F3(row, i) = weight[t] * a.F3(q, i).eval(pts[t]);
        }
    }
    return out;
}

BilinearScheme apa_to_bilinear(const ApaScheme& a, TriRole role) {
    return trilinear_to_bilinear(apa_to_exact(a), role);
}

// --------------------------------------------------------------------------
// Built-in schemes.
// --------------------------------------------------------------------------

namespace {

QMat qmat_from(std::size_t rows, std::size_t cols,
               std::initializer_list<int> vals) {
    QMat M(rows, cols);
    auto it = vals.begin();
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) M(i, j) = Rational(*it++);
    return M;
}

}  // namespace

BilinearScheme strassen_scheme() {
    QMat A = qmat_from(7, 4,
                       {1, 0, 0, 1,    // u11 + u22
                        0, 0, 1, 1,    // u21 + u22
                        1, 0, 0, 0,    // u11
                        -1, 0, 1, 0,   // u21 - u11
                        1, 1, 0, 0,    // u11 + u12
                        0, 0, 0, 1,    // u22
                        0, 1, 0, -1}); // u12 - u22
    QMat B = qmat_from(7, 4,
                       {1, 0, 0, 1,    // v11 + v22
                        1, 0, 0, 0,    // v11
                        0, 1, 0, -1,   // v12 - v22
                        1, 1, 0, 0,    // v11 + v12
                        0, 0, 0, 1,    // v22
                        -1, 0, 1, 0,   // v21 - v11
                        0, 0, 1, 1});  // v21 + v22
    QMat C = qmat_from(4, 7,
                       {1, 0, 0, 0, -1, 1, 1,    // x11
                        0, 0, 1, 0, 1, 0, 0,     // x12
                        0, 1, 0, 0, 0, 1, 0,     // x21
                        1, -1, 1, 1, 0, 0, 0});  // x22
    return BilinearScheme(2, 2, 2, std::move(A), std::move(B), std::move(C),
                          18);
}

BilinearScheme winograd_scheme() {
    QMat A = qmat_from(7, 4,
                       {-1, 0, 1, 1,   // s2 = u21 + u22 - u11
                        1, 0, 0, 0,    // u11
                        0, 1, 0, 0,    // u12
                        1, 0, -1, 0,   // s3 = u11 - u21
                        0, 0, 1, 1,    // s1 = u21 + u22
                        1, 1, -1, -1,  // s4 = u11 + u12 - u21 - u22
                        0, 0, 0, 1});  // u22
    QMat B = qmat_from(7, 4,
                       {1, -1, 0, 1,   // s6 = v11 - v12 + v22
                        1, 0, 0, 0,    // v11
                        0, 0, 1, 0,    // v21
                        0, -1, 0, 1,   // s7 = v22 - v12
                        -1, 1, 0, 0,   // s5 = v12 - v11
                        0, 0, 0, 1,    // v22
                        1, -1, -1, 1}); // s8 = v11 - v12 - v21 + v22
    QMat C = qmat_from(4, 7,
                       {0, 1, 1, 0, 0, 0, 0,     // x11 = p2 + p3
                        1, 1, 0, 0, 1, 1, 0,     // x12 = p1 + p2 + p5 + p6
                        1, 1, 0, 1, 0, 0, -1,    // x21 = p1 + p2 + p4 - p7
                        1, 1, 0, 1, 1, 0, 0});   // x22 = p1 + p2 + p4 + p5
    return BilinearScheme(2, 2, 2, std::move(A), std::move(B), std::move(C),
                          15);
}

BilinearScheme complex_mult_scheme() {
    QMat A = qmat_from(3, 2, {1, 0, 0, 1, 1, 1});
    QMat B = qmat_from(3, 2, {1, 0, 0, 1, 1, 1});
    QMat C = qmat_from(2, 3,
                       {1, -1, 0,     // re = l1 - l2
                        -1, -1, 1});  // im = l3 - l1 - l2
    TriTarget t;
    t.nu = t.nv = t.nw = 2;
    t.monomials = {{0, 0, 0, +1}, {1, 1, 0, -1}, {0, 1, 1, +1}, {1, 0, 1, +1}};
    return BilinearScheme(std::move(A), std::move(B), std::move(C),
                          std::move(t));
}

TrilinearScheme trilinear_mm2_scheme() {
    TrilinearScheme t;
    t.mm_dims = {{2, 2, 2}};
    t.target = TriTarget::mm_trace(2, 2, 2);
    t.F1 = qmat_from(7, 4,
                     {1, 0, 0, 1,    // u11 + u22
                      0, 0, 1, 1,    // u21 + u22
                      1, 0, 0, 0,    // u11
                      -1, 0, 1, 0,   // u21 - u11
                      1, 1, 0, 0,    // u11 + u12
                      0, 0, 0, 1,    // u22
                      0, 1, 0, -1}); // u12 - u22
    t.F2 = qmat_from(7, 4,
                     {1, 0, 0, 1,    // v11 + v22
                      1, 0, 0, 0,    // v11
                      0, 1, 0, -1,   // v12 - v22
                      1, 1, 0, 0,    // v11 + v12
                      0, 0, 0, 1,    // v22
                      -1, 0, 1, 0,   // v21 - v11
                      0, 0, 1, 1});  // v21 + v22
    // w variables indexed (k, i); the third linear forms of the rank-7
    // decomposition of trace(UVW).
    t.F3 = qmat_from(7, 4,
                     {1, 0, 0, 1,    // w11 + w22
                      0, 1, 0, -1,   // w12 - w22
                      0, 0, 1, 1,    // w21 + w22
                      0, 0, 0, 1,    // w22
                      -1, 0, 1, 0,   // w21 - w11
                      1, 1, 0, 0,    // w11 + w12
                      1, 0, 0, 0});  // w11
    return t;
}

}  // namespace ffmm
