#include "ffmm/lift.hpp"

#include <random>

namespace ffmm {

BigInt hadamard_bound(const IntMat& A) {
    if (A.rows() != A.cols())
        throw DimensionError("hadamard_bound: matrix must be square");
    // prod_i ||row_i||^2, then take the ceiling of the square root.
    BigInt prod = 1;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        BigInt s = 0;
        for (std::size_t j = 0; j < A.cols(); ++j) s += A(i, j) * A(i, j);
        if (s == 0) return 0;
        prod *= s;
    }
    BigInt root;
    mpz_sqrt(root.get_mpz_t(), prod.get_mpz_t());
    if (root * root < prod) root += 1;
    return root;
}

Rational rational_reconstruction(const BigInt& a, const BigInt& M,
                                 const BigInt& N, const BigInt& D) {
    if (a < 0 || a >= M)
        throw std::invalid_argument("rational_reconstruction: need 0 <= a < M");
    // Extended Euclid on (M, a), stopping at the first remainder <= N.
    BigInt r0 = M, r1 = a;
    BigInt t0 = 0, t1 = 1;
    while (r1 > N) {
        BigInt q = r0 / r1;
        BigInt r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        BigInt t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    BigInt num = r1, den = t1;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (den == 0 || den > D)
        throw ReconstructionFailure("no fraction within the given bounds");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (g != 1)
        throw ReconstructionFailure("reconstructed fraction is not reduced");
    BigInt gd;
    mpz_gcd(gd.get_mpz_t(), den.get_mpz_t(), M.get_mpz_t());
    if (gd != 1)
        throw ReconstructionFailure("denominator shares a factor with M");
    Rational out(num, den);
    out.canonicalize();
    return out;
}

Rational rational_reconstruction(const BigInt& a, const BigInt& M) {
    // N = floor(sqrt((M-1)/2)) and D = (M-1)/(2N): equal up to rounding,
    // with 2 N D < M guaranteeing uniqueness.
    BigInt N;
    BigInt half = (M - 1) / 2;
    mpz_sqrt(N.get_mpz_t(), half.get_mpz_t());
    if (N == 0) N = 1;
    BigInt D = (M - 1) / (2 * N);
    if (D == 0) D = 1;
    return rational_reconstruction(a, M, N, D);
}

BigInt PadicSeries::value(std::size_t entry) const {
    BigInt v = 0;
    for (std::size_t i = digits.size(); i-- > 0;)
        v = v * p + digits[i][entry];
    return v;
}

namespace {

std::int64_t random_prime(int bits, std::mt19937_64& rng) {
    if (bits < 3 || bits > 62)
        throw std::invalid_argument("dixon_solve: prime_bits out of range");
    const std::uint64_t lo = 1ull << (bits - 1), hi = (1ull << bits) - 1;
    std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
    for (int tries = 0; tries < 100000; ++tries) {
        std::uint64_t c = dist(rng) | 1;
        if (is_prime_u64(c)) return static_cast<std::int64_t>(c);
    }
    throw std::runtime_error("dixon_solve: failed to sample a prime");
}

// Balanced residue image of an integer matrix.
ElemMat mat_mod(const IntMat& A, const PrimeField& F) {
    ElemMat R(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) {
            std::uint64_t r = mpz_fdiv_ui(
                A(i, j).get_mpz_t(),
                static_cast<unsigned long>(F.modulus()));
            R(i, j) = F.reduce(static_cast<__int128>(r));
        }
    return R;
}

}  // namespace

RationalVector dixon_solve(const IntMat& A, const IntVec& b, int prime_bits,
                           DixonStats* stats, std::uint64_t seed,
                           PadicSeries* series_out) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw DimensionError("dixon_solve: A must be square");
    if (b.size() != n) throw DimensionError("dixon_solve: b size mismatch");
    if (n == 0) return {};

    BigInt had = hadamard_bound(A);
    if (had == 0) throw SingularSystemError("dixon_solve: A is singular");
    // Cramer + Hadamard: the solution numerators are determinants of A with
    // one column replaced by b, so the column-norm product bounds them (the
    // remaining integer columns have norm >= 1); the denominator divides
    // det A.
    IntMat At(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) At(i, j) = A(j, i);
    BigInt had_cols = hadamard_bound(At);
    if (had_cols == 0) throw SingularSystemError("dixon_solve: A is singular");
    BigInt bnorm2 = 0;
    for (const auto& e : b) bnorm2 += e * e;
    BigInt bnorm;
    mpz_sqrt(bnorm.get_mpz_t(), bnorm2.get_mpz_t());
    if (bnorm * bnorm < bnorm2) bnorm += 1;
    BigInt N = had_cols * std::max<BigInt>(bnorm, 1);
    BigInt D = had;

    std::mt19937_64 rng(seed);
    const int max_retries = 10;
    DixonStats local;
    DixonStats& st = stats ? *stats : local;

    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        std::int64_t p = random_prime(prime_bits, rng);
        PrimeField F(p);
        ElemMat Ap = mat_mod(A, F);
        LuResult fac;
        try {
            st.lu_calls++;
            fac = lu(Ap.view(), F);
        } catch (const GenericRankProfileViolation&) {
            st.retries++;
            continue;
        }
        std::int64_t detp = 1;
        for (std::size_t i = 0; i < n; ++i) detp = F.mul(detp, fac.U(i, i));
        if (detp == 0) {  // p divides det(A)
            st.retries++;
            continue;
        }
        st.prime = p;

        // Lifting order: smallest k with p^k > 2 N D.
        BigInt need = 2 * N * D;
        std::size_t k = 1;
        BigInt M = p;
        while (M <= need) {
            M *= p;
            ++k;
        }

        PadicSeries series;
        series.p = p;
        IntVec resid = b;  // current b_i over Z
        const BigInt pbig = p;
        auto lift_one = [&]() {
            ElemMat rhs(n, 1);
            for (std::size_t i = 0; i < n; ++i) {
                std::uint64_t r = mpz_fdiv_ui(
                    resid[i].get_mpz_t(), static_cast<unsigned long>(p));
                rhs(i, 0) = F.reduce(static_cast<__int128>(r));
            }
            ElemMat y = trsm_lower(fac.L.view(), rhs.view(), F);
            ElemMat x = trsm_upper(fac.U.view(), y.view(), F);
            series.digits.emplace_back(n);
            for (std::size_t i = 0; i < n; ++i)
                series.digits.back()[i] = x(i, 0);
            st.lift_steps++;
            // b_{i+1} = (b_i - A x_i) / p, exact over Z.
            for (std::size_t i = 0; i < n; ++i) {
                BigInt acc = resid[i];
                for (std::size_t j = 0; j < n; ++j) acc -= A(i, j) * x(j, 0);
                if (!mpz_divisible_p(acc.get_mpz_t(), pbig.get_mpz_t()))
                    throw std::logic_error(
                        "dixon_solve: residual not divisible by p");
                st.divisibility_checks++;
                resid[i] = acc / pbig;
            }
        };
        while (series.order() < k) lift_one();

        // Reconstruction; a failure is answered by lifting further before
        // giving up on this prime.
        for (int grow = 0; grow < 3; ++grow) {
            RationalVector out(n);
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                BigInt v = series.value(i);
                mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), M.get_mpz_t());
                try {
                    out[i] = rational_reconstruction(v, M, N, D);
                } catch (const ReconstructionFailure&) {
                    ok = false;
                }
            }
            if (ok) {
                if (series_out) *series_out = series;
                return out;
            }
            const std::size_t extra = std::max<std::size_t>(1, k / 2);
            for (std::size_t s = 0; s < extra; ++s) {
                lift_one();
                M *= p;
            }
            k += extra;
        }
        st.retries++;
    }
    throw SingularSystemError(
        "dixon_solve: retries exhausted (singular or unlucky primes)");
}

}  // namespace ffmm
