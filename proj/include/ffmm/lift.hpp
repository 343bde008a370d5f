// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <optional>
#include <vector>

#include "ffmm/dense.hpp"
#include "ffmm/factor.hpp"
#include "ffmm/rational.hpp"

namespace ffmm {

struct ReconstructionFailure : std::domain_error {
    using std::domain_error::domain_error;
};
struct SingularSystemError : std::domain_error {
    using std::domain_error::domain_error;
};

using IntMat = Mat<BigInt>;
using IntVec = std::vector<BigInt>;
using RationalVector = std::vector<Rational>;

// Ceiling of the product of the Euclidean row norms: |det A| <= bound.
BigInt hadamard_bound(const IntMat& A);

// Unique n/d with n * d^-1 = a (mod M), |n| <= N, 0 < d <= D, gcd(d, M) = 1.
// The single-argument bounds are N = D = floor(sqrt((M-1)/2)).
Rational rational_reconstruction(const BigInt& a, const BigInt& M);
Rational rational_reconstruction(const BigInt& a, const BigInt& M,
                                 const BigInt& N, const BigInt& D);

// Truncated p-adic expansion sum_i x_i p^i of the solution of A x = b.
struct PadicSeries {
    std::int64_t p = 0;
    std::vector<std::vector<std::int64_t>> digits;  // balanced residues
    std::size_t order() const { return digits.size(); }
    BigInt value(std::size_t entry) const;
};

struct DixonStats {
    int lu_calls = 0;
    int retries = 0;
    std::size_t lift_steps = 0;
    std::uint64_t divisibility_checks = 0;
    std::int64_t prime = 0;
};

// Exact rational solution of A x = b by p-adic lifting: one LU mod a random
// prime of `prime_bits` bits, reused for every step; the updates
// b_{i+1} = (b_i - A x_i)/p are exact integer operations with divisibility
// asserted.  Throws SingularSystemError when A is singular over Q.
// series_out, when given, receives the truncated expansion that was
// reconstructed from.
RationalVector dixon_solve(const IntMat& A, const IntVec& b,
                           int prime_bits = 20, DixonStats* stats = nullptr,
                           std::uint64_t seed = 0x9e3779b97f4a7c15ull,
                           PadicSeries* series_out = nullptr);

}  // namespace ffmm
