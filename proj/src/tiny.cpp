#include "ffmm/tiny.hpp"

#include <stdexcept>

namespace ffmm {

bool PackedF2Matrix::padding_clean() const {
    const std::size_t tail = cols_ % 64;
    if (tail == 0) return true;
    const std::uint64_t mask = ~std::uint64_t(0) << tail;
    for (std::size_t i = 0; i < rows_; ++i)
        if (w_[i * wpr_ + wpr_ - 1] & mask) return false;
    return true;
}

PackedF2Matrix f2_mm_naive(const PackedF2Matrix& A, const PackedF2Matrix& B,
                           TinyStats* stats) {
    if (A.cols() != B.rows())
        throw std::invalid_argument("f2 mm: inner dimensions differ");
    PackedF2Matrix C(A.rows(), B.cols());
    const std::size_t w = B.words_per_row();
    for (std::size_t i = 0; i < A.rows(); ++i) {
        std::uint64_t* crow = C.row(i);
        for (std::size_t j = 0; j < A.cols(); ++j) {
            if (!A.get(i, j)) continue;
            const std::uint64_t* brow = B.row(j);
            for (std::size_t t = 0; t < w; ++t) crow[t] ^= brow[t];
            if (stats) stats->word_ops += w;
        }
    }
    return C;
}

PackedF2Matrix f2_mm_four_russians(const PackedF2Matrix& A,
                                   const PackedF2Matrix& B, unsigned k,
                                   TinyStats* stats) {
    if (A.cols() != B.rows())
        throw std::invalid_argument("f2 mm: inner dimensions differ");
    if (k < 1 || k > 16)
        throw std::invalid_argument("f2 mm: stripe width must be in 1..16");
    PackedF2Matrix C(A.rows(), B.cols());
    const std::size_t n = A.cols();
    const std::size_t w = B.words_per_row();
    std::vector<std::uint64_t> table;
    for (std::size_t base = 0; base < n; base += k) {
        const unsigned s =
            static_cast<unsigned>(std::min<std::size_t>(k, n - base));
        const std::size_t tsize = std::size_t(1) << s;
        table.assign(tsize * w, 0);
        // Gray-code order: row gray(t) differs from gray(t-1) in bit
        // ctz(t), so each table row costs one row addition.
        std::size_t prev = 0;
        for (std::size_t t = 1; t < tsize; ++t) {
            std::size_t g = t ^ (t >> 1);
            unsigned bit = 0;
            {
                std::size_t d = t;
                while ((d & 1) == 0) {
                    d >>= 1;
                    ++bit;
                }
            }
            const std::uint64_t* brow = B.row(base + bit);
            std::uint64_t* dst = &table[g * w];
            const std::uint64_t* src = &table[prev * w];
            for (std::size_t x = 0; x < w; ++x) dst[x] = src[x] ^ brow[x];
            if (stats) {
                stats->row_adds++;
                stats->word_ops += w;
            }
            prev = g;
        }
        if (stats) stats->table_stripes++;
        for (std::size_t i = 0; i < A.rows(); ++i) {
            std::size_t idx = 0;
            for (unsigned t = 0; t < s; ++t)
                idx |= std::size_t(A.get(i, base + t)) << t;
            if (idx == 0) continue;
            const std::uint64_t* src = &table[idx * w];
            std::uint64_t* crow = C.row(i);
            for (std::size_t x = 0; x < w; ++x) crow[x] ^= src[x];
            if (stats) stats->word_ops += w;
        }
    }
    return C;
}

void SlicedF3Vector::set(std::size_t i, int v) {
    std::uint64_t bit = std::uint64_t(1) << (i % 64);
    x0[i / 64] &= ~bit;
    x1[i / 64] &= ~bit;
    if (v == 1) {
        x0[i / 64] |= bit;
    } else if (v == -1 || v == 2) {
        x0[i / 64] |= bit;
        x1[i / 64] |= bit;
    } else if (v != 0) {
        throw std::invalid_argument("sliced GF(3): value must be 0, 1 or -1");
    }
}

bool SlicedF3Vector::valid_encoding() const {
    const std::size_t tail = len % 64;
    for (std::size_t i = 0; i < x0.size(); ++i) {
        std::uint64_t forbidden = ~x0[i] & x1[i];
        if (i + 1 == x0.size() && tail)
            forbidden &= (std::uint64_t(1) << tail) - 1;
        if (forbidden) return false;
    }
    return true;
}

namespace {

void check_lengths(const SlicedF3Vector& x, const SlicedF3Vector& y) {
    if (x.len != y.len)
        throw std::invalid_argument("sliced GF(3): length mismatch");
}

}  // namespace

SlicedF3Vector f3_add(const SlicedF3Vector& x, const SlicedF3Vector& y,
                      TinyStats* stats) {
    check_lengths(x, y);
    SlicedF3Vector r(x.len);
    for (std::size_t i = 0; i < x.x0.size(); ++i) {
        std::uint64_t s = x.x0[i] ^ y.x1[i];
        std::uint64_t t = x.x1[i] ^ y.x0[i];
        r.x0[i] = (s ^ x.x1[i]) | (t ^ y.x1[i]);
        r.x1[i] = s & t;
        if (stats) stats->word_ops += 6;
    }
    return r;
}

SlicedF3Vector f3_sub(const SlicedF3Vector& x, const SlicedF3Vector& y,
                      TinyStats* stats) {
    check_lengths(x, y);
    SlicedF3Vector r(x.len);
    for (std::size_t i = 0; i < x.x0.size(); ++i) {
        std::uint64_t t = x.x0[i] ^ y.x0[i];
        r.x0[i] = t | (x.x1[i] ^ y.x1[i]);
        r.x1[i] = (t ^ y.x1[i]) & (y.x0[i] ^ x.x1[i]);
        if (stats) stats->word_ops += 6;
    }
    return r;
}

SlicedF3Vector f3_neg(const SlicedF3Vector& x, TinyStats* stats) {
    SlicedF3Vector r(x.len);
    r.x0 = x.x0;
    for (std::size_t i = 0; i < x.x0.size(); ++i) {
        r.x1[i] = x.x0[i] ^ x.x1[i];
        if (stats) stats->word_ops += 1;
    }
    return r;
}

std::vector<SlicedF3Vector> f3_mm(const std::vector<std::vector<int>>& A,
                                  const std::vector<SlicedF3Vector>& B,
                                  TinyStats* stats) {
    if (!A.empty() && A[0].size() != B.size())
        throw std::invalid_argument("f3 mm: inner dimensions differ");
    const std::size_t cols = B.empty() ? 0 : B[0].len;
    std::vector<SlicedF3Vector> C;
    C.reserve(A.size());
    for (const auto& arow : A) {
        SlicedF3Vector acc(cols);
        for (std::size_t j = 0; j < arow.size(); ++j) {
            if (arow[j] == 0) continue;
            acc = arow[j] == 1 ? f3_add(acc, B[j], stats)
                               : f3_sub(acc, B[j], stats);
        }
        C.push_back(std::move(acc));
    }
    return C;
}

PackedInt kron_pack(const std::vector<std::int64_t>& v, unsigned slot_bits) {
    std::vector<BigInt> b(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0)
            throw PackError("kron_pack: residues must be unsigned canonical");
        b[i] = static_cast<unsigned long>(v[i]);
    }
    return pack(b, slot_bits);
}

std::vector<std::int64_t> kron_unpack(const PackedInt& P) {
    std::vector<BigInt> b = unpack(P);
    std::vector<std::int64_t> v(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[i].get_si();
    return v;
}

PackedInt simultaneous_reduce(const PackedInt& P, std::int64_t p) {
    // Baseline grouping: split, reduce every slot, regroup.
    BigInt cap = BigInt(1) << P.k;
    if (P.max_slot >= cap)
        throw PackError("simultaneous_reduce: slot overflow");
    std::vector<BigInt> v(P.n);
    BigInt rest = P.value;
    BigInt mask = cap - 1;
    for (std::size_t i = 0; i < P.n; ++i) {
        v[i] = (rest & mask) % p;
        rest >>= P.k;
    }
    PackedInt r = pack(v, P.k);
    return r;
}

}  // namespace ffmm
