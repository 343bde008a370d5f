// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ffmm/dense.hpp"
#include "ffmm/field.hpp"
#include "ffmm/rational.hpp"

namespace ffmm {

struct SchemeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using QMat = Mat<Rational>;
using LMat = Mat<LaurentPoly>;

// A signed monomial of a trilinear (or bilinear) target: one variable index
// per factor space.
struct TargetMonomial {
    std::size_t a, b, c;
    int sign;  // +1 or -1
};

// Sparse trilinear target over three variable spaces.  Matrix traces and
// disjoint sums of traces are built by the factories; the monomial list is
// the ground truth for verification.
struct TriTarget {
    std::size_t nu = 0, nv = 0, nw = 0;
    std::vector<TargetMonomial> monomials;

    // trace(UVW) with U m-by-n, V n-by-p, W p-by-m; w variables carry index
    // pairs (k, i).
    static TriTarget mm_trace(std::size_t m, std::size_t n, std::size_t p);
    // trace(XYZ + UVW): two disjoint products sharing the three factor
    // spaces, X m-by-n and U n-by-p.
    static TriTarget disjoint_pair(std::size_t m, std::size_t n,
                                   std::size_t p);
    // trace(XYZ + UVW + ABC).
    static TriTarget disjoint_triple(std::size_t m, std::size_t n,
                                     std::size_t p);

    bool operator==(const TriTarget&) const = default;
};

// Index helpers for the disjoint-trace variable spaces.
struct PairIdx {
    std::size_t m, n, p;
    std::size_t x(std::size_t i, std::size_t j) const { return i * n + j; }
    std::size_t u(std::size_t j, std::size_t k) const {
        return m * n + j * p + k;
    }
    std::size_t y(std::size_t j, std::size_t k) const { return j * p + k; }
    std::size_t v(std::size_t k, std::size_t i) const {
        return n * p + k * m + i;
    }
    std::size_t z(std::size_t k, std::size_t i) const { return k * m + i; }
    std::size_t w(std::size_t i, std::size_t j) const {
        return p * m + i * n + j;
    }
};

struct TripleIdx {
    std::size_t m, n, p;
    std::size_t x(std::size_t i, std::size_t j) const { return i * n + j; }
    std::size_t u(std::size_t j, std::size_t k) const {
        return m * n + j * p + k;
    }
    std::size_t a(std::size_t k, std::size_t i) const {
        return m * n + n * p + k * m + i;
    }
    std::size_t y(std::size_t j, std::size_t k) const { return j * p + k; }
    std::size_t v(std::size_t k, std::size_t i) const {
        return n * p + k * m + i;
    }
    std::size_t b(std::size_t i, std::size_t j) const {
        return n * p + p * m + i * n + j;
    }
    std::size_t z(std::size_t k, std::size_t i) const { return k * m + i; }
    std::size_t w(std::size_t i, std::size_t j) const {
        return p * m + i * n + j;
    }
    std::size_t c(std::size_t j, std::size_t k) const {
        return p * m + m * n + j * p + k;
    }
};

// Rank-r bilinear scheme: x = C * ((A u) .* (B v)) in coefficient form.
// An MM(m,n,p) scheme has the Brent delta tensor as its implied target;
// other bilinear problems (complex multiplication, disjoint products
// extracted from trilinear decompositions) carry an explicit target whose
// third component indexes the output space.
class BilinearScheme {
public:
    BilinearScheme(std::size_t m, std::size_t n, std::size_t p, QMat A,
                   QMat B, QMat C, int schedule_additions = -1);
    BilinearScheme(QMat A, QMat B, QMat C, TriTarget target,
                   int schedule_additions = -1);

    // Copies drop the per-modulus cache (it regenerates on demand).
    BilinearScheme(const BilinearScheme& o)
        : is_mm_(o.is_mm_), m_(o.m_), n_(o.n_), p_(o.p_), A_(o.A_), B_(o.B_),
          C_(o.C_), target_(o.target_),
          schedule_additions_(o.schedule_additions_) {}
    BilinearScheme& operator=(const BilinearScheme& o) {
        if (this != &o) {
            is_mm_ = o.is_mm_;
            m_ = o.m_;
            n_ = o.n_;
            p_ = o.p_;
            A_ = o.A_;
            B_ = o.B_;
            C_ = o.C_;
            target_ = o.target_;
            schedule_additions_ = o.schedule_additions_;
            std::lock_guard<std::mutex> lock(cache_mu_);
            cache_.clear();
        }
        return *this;
    }

    bool is_mm() const { return is_mm_; }
    std::size_t m() const { return m_; }
    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }
    std::size_t rank() const { return A_.rows(); }
    std::size_t nu() const { return A_.cols(); }
    std::size_t nv() const { return B_.cols(); }
    std::size_t nx() const { return C_.rows(); }
    const QMat& A() const { return A_; }
    const QMat& B() const { return B_; }
    const QMat& C() const { return C_; }
    const TriTarget& target() const { return target_; }
    int schedule_additions() const { return schedule_additions_; }

    // Coefficients mapped to canonical residues mod F (cached per modulus);
    // throws NotInvertibleError if a denominator vanishes mod p.
    const std::vector<std::int64_t>& alpha_mod(const PrimeField& F) const;
    const std::vector<std::int64_t>& beta_mod(const PrimeField& F) const;
    const std::vector<std::int64_t>& gamma_mod(const PrimeField& F) const;

private:
    struct ModCache {
        std::vector<std::int64_t> alpha, beta, gamma;
    };
    const ModCache& cache_for(const PrimeField& F) const;

    bool is_mm_;
    std::size_t m_ = 0, n_ = 0, p_ = 0;
    QMat A_, B_, C_;  // A: r x nu, B: r x nv, C: nx x r
    TriTarget target_;
    int schedule_additions_;
    mutable std::mutex cache_mu_;
    mutable std::map<std::int64_t, std::shared_ptr<ModCache>> cache_;
};

// Rank-r trilinear decomposition sum_q F1_q * F2_q * F3_q of a target.
struct TrilinearScheme {
    QMat F1, F2, F3;  // each r x (space size)
    TriTarget target;
    // set when the target is a single matrix trace
    std::optional<std::array<std::size_t, 3>> mm_dims;

    std::size_t rank() const { return F1.rows(); }
};

// APA scheme: trilinear decomposition with Laurent-polynomial coefficients
// computing the target up to O(lambda).
struct ApaScheme {
    LMat F1, F2, F3;
    TriTarget target;
    std::optional<std::array<std::size_t, 3>> mm_dims;

    std::size_t border_rank() const { return F1.rows(); }
    // max |lambda power| over the expanded terms of any single product
    int degree() const;
};

// --------------------------------------------------------------------------
// Verification (exact rational arithmetic throughout).
// --------------------------------------------------------------------------

// Brent coefficient identities for MM schemes; general targets are checked
// against their monomial list.  Returns the first failing index triple
// through `fail` when given.
bool brent_verify(const BilinearScheme& s,
                  std::array<std::size_t, 3>* fail = nullptr);
bool trilinear_verify(const TrilinearScheme& t);
// True iff the expansion equals target plus terms of strictly positive
// lambda power, with no negative powers surviving.
bool apa_verify(const ApaScheme& a);

// --------------------------------------------------------------------------
// Application.
// --------------------------------------------------------------------------

ElemMat apply_scheme(const BilinearScheme& s, ConstElemView U,
                     ConstElemView V, const PrimeField& F,
                     OpCounter* ops = nullptr);
std::vector<std::int64_t> apply_scheme_vec(const BilinearScheme& s,
                                           const std::vector<std::int64_t>& u,
                                           const std::vector<std::int64_t>& v,
                                           const PrimeField& F,
                                           OpCounter* ops = nullptr);

// --------------------------------------------------------------------------
// Duality and conversions.
// --------------------------------------------------------------------------

enum class TriRole { U, V, W };

// The six bilinear algorithms sharing one trilinear decomposition:
// the identity, the two cyclic role shifts, and their transposes.
enum class DualPerm {
    Identity,       // MM(m,n,p)
    RotateLeft,     // MM(n,p,m)
    RotateRight,    // MM(p,m,n)
    Transpose,      // MM(m,p,n)
    TransposeLeft,  // MM(p,n,m)
    TransposeRight  // MM(n,m,p)
};
inline constexpr std::array<DualPerm, 6> all_dual_perms = {
    DualPerm::Identity,      DualPerm::RotateLeft,
    DualPerm::RotateRight,   DualPerm::Transpose,
    DualPerm::TransposeLeft, DualPerm::TransposeRight};

TrilinearScheme bilinear_to_trilinear(const BilinearScheme& s);
BilinearScheme trilinear_to_bilinear(const TrilinearScheme& t,
                                     TriRole role = TriRole::W);
BilinearScheme dualize(const BilinearScheme& s, DualPerm perm);

// Term-order-insensitive equality: products normalized (primitive integer
// rows, positive leading coefficient, scale pushed into C) then sorted.
BilinearScheme canonical_form(const BilinearScheme& s);
bool scheme_equal(const BilinearScheme& a, const BilinearScheme& b);

// --------------------------------------------------------------------------
// Exponents.
// --------------------------------------------------------------------------

double exponent_of(std::size_t m, std::size_t n, std::size_t p,
                   std::size_t r);
double apa_exponent(std::size_t m, std::size_t n, std::size_t p,
                    std::size_t border_rank, std::size_t disjoint_count);

// --------------------------------------------------------------------------
// Trilinear aggregation generators and APA constructions.
// --------------------------------------------------------------------------

// trace(XYZ + UVW) from the pair aggregation table: rank exactly
// mnp + mn + np + pm, verified.
TrilinearScheme agg_pair_scheme(std::size_t m, std::size_t n, std::size_t p);

// trace(XYZ + UVW + ABC) from the triple aggregation table plus derived
// corrections; reports its achieved rank via rank().
TrilinearScheme agg_triple_scheme(std::size_t m, std::size_t n,
                                  std::size_t p);

// Exact rank-R decomposition of a single trace(UVW); R = mnp for odd
// dimensions, rank-7 tensor recursion on fully even dimensions.
TrilinearScheme mm_trace_scheme(std::size_t m, std::size_t n, std::size_t p);

// APA pair aggregation: border rank exactly mnp + mn + np.
ApaScheme apa_pair_scheme(std::size_t m, std::size_t n, std::size_t p);

// Lift an exact scheme to a lambda-free APA scheme (degree 0).
ApaScheme apa_from_trilinear(const TrilinearScheme& t);

// Interpolate the lambda^0 coefficient at 2d+1 distinct rational points,
// producing an exact scheme of rank (2d+1) * border_rank.
TrilinearScheme apa_to_exact(const ApaScheme& a);
BilinearScheme apa_to_bilinear(const ApaScheme& a, TriRole role = TriRole::W);

// --------------------------------------------------------------------------
// Built-in schemes.
// --------------------------------------------------------------------------

BilinearScheme strassen_scheme();
BilinearScheme winograd_scheme();
BilinearScheme complex_mult_scheme();
TrilinearScheme trilinear_mm2_scheme();

}  // namespace ffmm
