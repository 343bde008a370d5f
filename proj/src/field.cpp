#include "ffmm/field.hpp"

namespace ffmm {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This base set is a proven witness set for all n < 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

PrimeField::PrimeField(std::int64_t p, Rep rep, int mantissa_bits)
    : p_(p), half_((p - 1) / 2), rep_(rep), mantissa_bits_(mantissa_bits) {
    if (p < 3 || (p & 1) == 0)
        throw InvalidModulusError("modulus must be an odd prime >= 3");
    // Unsigned residues a + b reach 2(p-1), which must stay inside int64.
    if (rep == Rep::Unsigned && p > (std::int64_t(1) << 62))
        throw InvalidModulusError(
            "unsigned representation requires p <= 2^62");
    if (!is_prime_u64(static_cast<std::uint64_t>(p)))
        throw InvalidModulusError("modulus " + std::to_string(p) +
                                  " is not prime");
    if (mantissa_bits < 1 || mantissa_bits > 63)
        throw InvalidModulusError("mantissa_bits must be in 1..63");
}

std::int64_t PrimeField::reduce(__int128 x) const {
    std::int64_t r = static_cast<std::int64_t>(x % p_);
    if (rep_ == Rep::Balanced) {
        if (r > half_) r -= p_;
        if (r < -half_) r += p_;
    } else {
        if (r < 0) r += p_;
    }
    return r;
}

std::int64_t PrimeField::add(std::int64_t a, std::int64_t b) const {
    std::int64_t s = a + b;  // canonical inputs cannot overflow int64
    if (rep_ == Rep::Balanced) {
        if (s > half_) s -= p_;
        if (s < -half_) s += p_;
    } else {
        if (s >= p_) s -= p_;
    }
    return s;
}

std::int64_t PrimeField::sub(std::int64_t a, std::int64_t b) const {
    std::int64_t s = a - b;
    if (rep_ == Rep::Balanced) {
        if (s > half_) s -= p_;
        if (s < -half_) s += p_;
    } else {
        if (s < 0) s += p_;
    }
    return s;
}

std::int64_t PrimeField::mul(std::int64_t a, std::int64_t b) const {
    return reduce(static_cast<__int128>(a) * b);
}

std::int64_t PrimeField::neg(std::int64_t a) const {
    return rep_ == Rep::Balanced ? -a : (a == 0 ? 0 : p_ - a);
}

std::int64_t PrimeField::inv(std::int64_t a) const {
    if (a == 0) throw NotInvertibleError("zero has no inverse");
    // Extended Euclid on (p, a) with a mapped to {1..p-1}.
    std::int64_t r0 = p_, r1 = a < 0 ? a + p_ : a;
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        std::int64_t t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    if (r0 != 1) throw NotInvertibleError("element not invertible");
    return reduce(t0);
}

FieldElem ff_arith(const FieldElem& a, const FieldElem& b, ArithOp op,
                   OpCounter* ops) {
    if (!a.field) throw FieldMismatchError("element has no field");
    if (op != ArithOp::Neg && (!b.field || !(*a.field == *b.field)))
        throw FieldMismatchError("operands belong to different fields");
    const PrimeField& F = *a.field;
    FieldElem r{0, a.field};
    switch (op) {
        case ArithOp::Add:
            r.value = F.add(a.value, b.value);
            if (ops) ops->adds++;
            break;
        case ArithOp::Sub:
            r.value = F.sub(a.value, b.value);
            if (ops) ops->adds++;
            break;
        case ArithOp::Mul:
            r.value = F.mul(a.value, b.value);
            if (ops) {
                ops->mults++;
                ops->reductions++;
            }
            break;
        case ArithOp::Neg:
            r.value = F.neg(a.value);
            if (ops) ops->adds++;
            break;
    }
    return r;
}

FieldElem ff_inv(const FieldElem& a, OpCounter* ops) {
    if (!a.field) throw FieldMismatchError("element has no field");
    FieldElem r{a.field->inv(a.value), a.field};
    if (ops) ops->mults++;
    return r;
}

std::int64_t delayed_bound(std::int64_t p, int mantissa_bits, int levels,
                           Rep rep) {
    if (p < 3 || mantissa_bits < 1 || mantissa_bits > 63 || levels < 0)
        throw BoundError("delayed_bound: bad parameters");
    const unsigned __int128 limit =
        (static_cast<unsigned __int128>(1) << mantissa_bits) - 1;
    const unsigned __int128 mag =
        rep == Rep::Balanced ? static_cast<unsigned __int128>((p - 1) / 2)
                             : static_cast<unsigned __int128>(p - 1);
    const unsigned __int128 c = mag * mag;
    if (levels == 0) {
        if (c == 0) return static_cast<std::int64_t>(limit);  // p == 1 guard
        unsigned __int128 k = limit / c;
        if (k < 1)
            throw BoundError("delayed_bound: modulus too large for the accumulator");
        const unsigned __int128 imax = INT64_MAX;
        return static_cast<std::int64_t>(k > imax ? imax : k);
    }
    // 9^l * floor(k/2^l) * c < 2^m; largest admissible floor value q, then
    // k = (q+1)*2^l - 1.  Equality resolves to the smaller k (strict <).
    unsigned __int128 nine = 1;
    bool overflow = false;
    for (int i = 0; i < levels; ++i) {
        if (nine > limit) {
            overflow = true;
            break;
        }
        nine *= 9;
    }
    unsigned __int128 q = 0;
    if (!overflow && nine * c != 0) q = limit / (nine * c);
    if (levels >= 63)
        throw BoundError("delayed_bound: recursion depth too large");
    unsigned __int128 k =
        (q + 1) * (static_cast<unsigned __int128>(1) << levels) - 1;
    if (k < 1) throw BoundError("delayed_bound: no admissible length");
    const unsigned __int128 imax = INT64_MAX;
    return static_cast<std::int64_t>(k > imax ? imax : k);
}

std::int64_t delayed_dot_chunked(const std::int64_t* u, std::size_t ustride,
                                 const std::int64_t* v, std::size_t vstride,
                                 std::size_t len, const PrimeField& F,
                                 std::int64_t chunk, OpCounter* ops) {
    if (len == 0) return 0;
    std::int64_t total = 0;
    bool have_total = false;
    std::uint64_t mults = 0, adds = 0, reductions = 0;
    std::size_t i = 0;
    if (chunk >= 1) {
        while (i < len) {
            std::size_t stop = i + static_cast<std::size_t>(chunk);
            if (stop > len) stop = len;
            std::int64_t acc = 0;
            for (; i < stop; ++i)
                acc += u[i * ustride] * v[i * vstride];
            std::int64_t red = F.reduce(acc);
            reductions++;
            if (have_total) {
                total = F.add(total, red);
            } else {
                total = red;
                have_total = true;
            }
        }
        mults += len;
        adds += len - 1;  // len - chunks within chunks, chunks - 1 merges
    } else {
        // Modulus too large to delay even one product: reduce per term.
        for (; i < len; ++i) {
            std::int64_t t =
                F.reduce(static_cast<__int128>(u[i * ustride]) * v[i * vstride]);
            reductions++;
            if (have_total) {
                total = F.add(total, t);
            } else {
                total = t;
                have_total = true;
            }
        }
        mults += len;
        adds += len - 1;
    }
    if (ops) {
        ops->mults += mults;
        ops->adds += adds;
        ops->reductions += reductions;
    }
    return total;
}

std::int64_t delayed_dot(const std::int64_t* u, std::size_t ustride,
                         const std::int64_t* v, std::size_t vstride,
                         std::size_t len, const PrimeField& F,
                         OpCounter* ops) {
    std::int64_t chunk;
    try {
        chunk = delayed_bound(F.modulus(), F.mantissa_bits(), 0, F.rep());
    } catch (const BoundError&) {
        chunk = 0;
    }
    return delayed_dot_chunked(u, ustride, v, vstride, len, F, chunk, ops);
}

}  // namespace ffmm
