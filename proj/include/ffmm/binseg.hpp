// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <cstdint>
#include <vector>

#include "ffmm/rational.hpp"

namespace ffmm {

struct PackError : std::domain_error {
    using std::domain_error::domain_error;
};

// A 2^k-ary packed vector: value = sum_i v_i 2^{k i}, v_i < 2^k.
// max_slot tracks the declared per-slot bound so that slot overflow after
// packed additions is detectable.
struct PackedInt {
    BigInt value;
    unsigned k = 0;        // slot width in bits
    std::size_t n = 0;     // slot count
    BigInt max_slot = 0;   // declared upper bound on any slot value
};

struct BinsegStats {
    std::uint64_t big_mults = 0;
};

PackedInt pack(const std::vector<BigInt>& v, unsigned k);
std::vector<BigInt> unpack(const PackedInt& P);

// Positionwise addition while each slot sum stays below 2^k; the overflow
// check fires on unpack of a saturated result.
PackedInt packed_add(const PackedInt& a, const PackedInt& b);

// Inner product by one big-integer multiplication: u packed with ascending
// slots, v with descending slots, slot width k = g + h + ceil(log2 n);
// the answer is slot n-1 of the product.
BigInt binseg_inner(const std::vector<BigInt>& u, const std::vector<BigInt>& v,
                    unsigned g, unsigned h, BinsegStats* stats = nullptr);
// Same computation with an explicit slot width (used to demonstrate that
// the bound is tight).
BigInt binseg_inner_with_slot(const std::vector<BigInt>& u,
                              const std::vector<BigInt>& v, unsigned k,
                              BinsegStats* stats = nullptr);

// Summation of n integers in [0, 2^h) via the all-ones inner product.
BigInt binseg_sum(const std::vector<BigInt>& v, unsigned h,
                  BinsegStats* stats = nullptr);

// Summation of integers in [q, r) by shifting into the nonnegative range.
BigInt binseg_sum_signed(const std::vector<BigInt>& v, const BigInt& q,
                         const BigInt& r, BinsegStats* stats = nullptr);

unsigned ceil_log2(std::size_t n);

}  // namespace ffmm
