#include "ffmm/binseg.hpp"

namespace ffmm {

unsigned ceil_log2(std::size_t n) {
    unsigned b = 0;
    while ((std::size_t(1) << b) < n) ++b;
    return b;
}

PackedInt pack(const std::vector<BigInt>& v, unsigned k) {
    if (k == 0) throw PackError("pack: slot width must be positive");
    BigInt cap = BigInt(1) << k;
    PackedInt P;
    P.k = k;
    P.n = v.size();
    for (std::size_t i = v.size(); i-- > 0;) {
        if (v[i] < 0 || v[i] >= cap)
            throw PackError("pack: entry out of slot range");
        if (v[i] > P.max_slot) P.max_slot = v[i];
        P.value <<= k;
        P.value += v[i];
    }
    return P;
}

std::vector<BigInt> unpack(const PackedInt& P) {
    BigInt cap = BigInt(1) << P.k;
    if (P.max_slot >= cap)
        throw PackError("unpack: slot overflow (slack exhausted)");
    std::vector<BigInt> v(P.n);
    BigInt rest = P.value;
    BigInt mask = cap - 1;
    for (std::size_t i = 0; i < P.n; ++i) {
        v[i] = rest & mask;
        rest >>= P.k;
    }
    return v;
}

PackedInt packed_add(const PackedInt& a, const PackedInt& b) {
    if (a.k != b.k || a.n != b.n)
        throw PackError("packed_add: incompatible layouts");
    PackedInt r;
    r.k = a.k;
    r.n = a.n;
    r.value = a.value + b.value;
    r.max_slot = a.max_slot + b.max_slot;
    return r;
}

BigInt binseg_inner_with_slot(const std::vector<BigInt>& u,
                              const std::vector<BigInt>& v, unsigned k,
                              BinsegStats* stats) {
    if (u.size() != v.size())
        throw PackError("binseg_inner: length mismatch");
    const std::size_t n = u.size();
    if (n == 0) return 0;
    // u(x) = sum u_i x^i and v(x) = sum v_i x^{n-1-i}, both at x = 2^k;
    // the inner product is the coefficient of x^{n-1} in the product.
    BigInt uv(0), vv(0);
    for (std::size_t i = n; i-- > 0;) {
        uv <<= k;
        uv += u[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        vv <<= k;
        vv += v[i];
    }
    BigInt prod = uv * vv;
    if (stats) stats->big_mults++;
    prod >>= k * (n - 1);
    return prod & ((BigInt(1) << k) - 1);
}

BigInt binseg_inner(const std::vector<BigInt>& u, const std::vector<BigInt>& v,
                    unsigned g, unsigned h, BinsegStats* stats) {
    if (u.size() != v.size())
        throw PackError("binseg_inner: length mismatch");
    const std::size_t n = u.size();
    if (n == 0) return 0;
    BigInt gcap = BigInt(1) << g, hcap = BigInt(1) << h;
    for (const auto& x : u)
        if (x < 0 || x >= gcap) throw PackError("binseg_inner: u out of range");
    for (const auto& x : v)
        if (x < 0 || x >= hcap) throw PackError("binseg_inner: v out of range");
    return binseg_inner_with_slot(u, v, g + h + ceil_log2(n), stats);
}

BigInt binseg_sum(const std::vector<BigInt>& v, unsigned h,
                  BinsegStats* stats) {
    if (v.empty()) return 0;
    BigInt hcap = BigInt(1) << h;
    for (const auto& x : v)
        if (x < 0 || x >= hcap) throw PackError("binseg_sum: entry out of range");
    // The all-ones inner product with g = 0: the unit entries saturate the
    // g bound, so the slot width k = h + ceil(log2 n) is applied directly.
    std::vector<BigInt> ones(v.size(), BigInt(1));
    return binseg_inner_with_slot(ones, v, h + ceil_log2(v.size()), stats);
}

BigInt binseg_sum_signed(const std::vector<BigInt>& v, const BigInt& q,
                         const BigInt& r, BinsegStats* stats) {
    if (q >= r) throw PackError("binseg_sum_signed: empty range");
    if (v.empty()) return 0;
    std::vector<BigInt> shifted(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < q || v[i] >= r)
            throw PackError("binseg_sum_signed: entry outside [q, r)");
        shifted[i] = v[i] - q;
    }
    BigInt span = r - q;
    unsigned h = 1;
    while ((BigInt(1) << h) < span) ++h;
    BigInt s = binseg_sum(shifted, h, stats);
    return s + q * static_cast<unsigned long>(v.size());
}

}  // namespace ffmm
