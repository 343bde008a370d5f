// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <cstdint>
#include <vector>

#include "ffmm/binseg.hpp"
#include "ffmm/field.hpp"

namespace ffmm {

// Bit-packed GF(2) matrix: 64 columns per word, zero-padded tail.
class PackedF2Matrix {
public:
    PackedF2Matrix() : rows_(0), cols_(0), wpr_(0) {}
    PackedF2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64),
          w_(rows * wpr_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t i, std::size_t j) const {
        return (w_[i * wpr_ + j / 64] >> (j % 64)) & 1;
    }
    void set(std::size_t i, std::size_t j, bool v) {
        std::uint64_t& word = w_[i * wpr_ + j / 64];
        std::uint64_t bit = std::uint64_t(1) << (j % 64);
        word = v ? (word | bit) : (word & ~bit);
    }
    const std::uint64_t* row(std::size_t i) const { return &w_[i * wpr_]; }
    std::uint64_t* row(std::size_t i) { return &w_[i * wpr_]; }

    bool padding_clean() const;
    bool operator==(const PackedF2Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && w_ == o.w_;
    }

private:
    std::size_t rows_, cols_, wpr_;
    std::vector<std::uint64_t> w_;
};

struct TinyStats {
    std::uint64_t row_adds = 0;        // table-building row XORs
    std::uint64_t word_ops = 0;        // word-wide Boolean operations
    std::uint64_t table_stripes = 0;
};

// C = A B over GF(2) by the four-Russians table method: per stripe of
// `k` inner rows, the 2^k combination table is built in Gray-code order
// with exactly 2^k - 1 row additions.
PackedF2Matrix f2_mm_four_russians(const PackedF2Matrix& A,
                                   const PackedF2Matrix& B, unsigned k,
                                   TinyStats* stats = nullptr);
// Straightforward packed triple loop, the comparison baseline.
PackedF2Matrix f2_mm_naive(const PackedF2Matrix& A, const PackedF2Matrix& B,
                           TinyStats* stats = nullptr);

// Bit-sliced GF(3) vector: planes [x0, x1] encode 0 = [0,0], 1 = [1,0],
// -1 = [1,1]; the state [0,1] never occurs.
struct SlicedF3Vector {
    std::vector<std::uint64_t> x0, x1;
    std::size_t len = 0;

    explicit SlicedF3Vector(std::size_t n = 0)
        : x0((n + 63) / 64, 0), x1((n + 63) / 64, 0), len(n) {}

    int get(std::size_t i) const {
        bool b0 = (x0[i / 64] >> (i % 64)) & 1;
        bool b1 = (x1[i / 64] >> (i % 64)) & 1;
        return b0 ? (b1 ? -1 : 1) : 0;
    }
    void set(std::size_t i, int v);
    bool valid_encoding() const;
};

SlicedF3Vector f3_add(const SlicedF3Vector& x, const SlicedF3Vector& y,
                      TinyStats* stats = nullptr);
SlicedF3Vector f3_sub(const SlicedF3Vector& x, const SlicedF3Vector& y,
                      TinyStats* stats = nullptr);
SlicedF3Vector f3_neg(const SlicedF3Vector& x, TinyStats* stats = nullptr);

// Row-combination product of a scalar {0,1,-1} matrix with sliced rows.
std::vector<SlicedF3Vector> f3_mm(const std::vector<std::vector<int>>& A,
                                  const std::vector<SlicedF3Vector>& B,
                                  TinyStats* stats = nullptr);

// Kronecker-substitution packing of canonical unsigned residues mod p into
// one big integer with `slot_bits` per coefficient.
PackedInt kron_pack(const std::vector<std::int64_t>& v, unsigned slot_bits);
std::vector<std::int64_t> kron_unpack(const PackedInt& P);

// Every slot replaced by its residue mod p (unsigned range).
PackedInt simultaneous_reduce(const PackedInt& P, std::int64_t p);

}  // namespace ffmm
