#include "doctest.h"

#include <random>

#include "ffmm/tiny.hpp"

using namespace ffmm;

namespace {

PackedF2Matrix random_f2(std::size_t r, std::size_t c, std::mt19937_64& rng) {
    PackedF2Matrix M(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) M.set(i, j, rng() & 1);
    return M;
}

// bit-by-bit triple loop over GF(2)
PackedF2Matrix f2_oracle(const PackedF2Matrix& A, const PackedF2Matrix& B) {
    PackedF2Matrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < B.cols(); ++k) {
            bool acc = false;
            for (std::size_t j = 0; j < A.cols(); ++j)
                acc ^= A.get(i, j) & B.get(j, k);
            C.set(i, k, acc);
        }
    return C;
}

SlicedF3Vector slice_of(const std::vector<int>& v) {
    SlicedF3Vector s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) s.set(i, v[i]);
    return s;
}

int mod3_balanced(long x) {
    long r = x % 3;
    if (r < 0) r += 3;
    return r == 2 ? -1 : static_cast<int>(r);
}

}  // namespace

TEST_CASE("four russians: identity and oracle agreement") {
    std::mt19937_64 rng(71);
    PackedF2Matrix I(48, 48);
    for (std::size_t i = 0; i < 48; ++i) I.set(i, i, true);
    PackedF2Matrix B = random_f2(48, 90, rng);
    CHECK(f2_mm_four_russians(I, B, 5) == B);

    for (auto [r, c, k] :
         {std::tuple<std::size_t, std::size_t, unsigned>{64, 64, 4},
          {128, 128, 8}, {70, 33, 3}, {1, 200, 6}, {256, 256, 8}}) {
        PackedF2Matrix A = random_f2(r, c, rng);
        PackedF2Matrix M = random_f2(c, r, rng);
        PackedF2Matrix got = f2_mm_four_russians(A, M, k);
        CHECK(got == f2_oracle(A, M));
        CHECK(got.padding_clean());
        CHECK(got == f2_mm_naive(A, M));
    }
}

TEST_CASE("four russians: table costs exactly 2^k - 1 row additions") {
    std::mt19937_64 rng(72);
    for (unsigned k : {2u, 4u, 8u}) {
        const std::size_t n = 4 * k;  // inner dimension a multiple of k
        PackedF2Matrix A = random_f2(32, n, rng);
        PackedF2Matrix B = random_f2(n, 80, rng);
        TinyStats stats;
        f2_mm_four_russians(A, B, k, &stats);
        CHECK(stats.table_stripes == n / k);
        CHECK(stats.row_adds == (n / k) * ((1ull << k) - 1));
    }
}

TEST_CASE("four russians beats the naive packed loop for large sizes") {
    std::mt19937_64 rng(73);
    std::uint64_t prev_ratio_num = 1, prev_ratio_den = 1;
    for (std::size_t n : {512u, 1024u}) {
        PackedF2Matrix A = random_f2(n, n, rng);
        PackedF2Matrix B = random_f2(n, n, rng);
        const unsigned k = ceil_log2(n);
        TinyStats four, naive;
        f2_mm_four_russians(A, B, k, &four);
        f2_mm_naive(A, B, &naive);
        CHECK(four.word_ops < naive.word_ops);
        // improving trend as n grows
        CHECK(four.word_ops * prev_ratio_den <=
              naive.word_ops * prev_ratio_num);
        prev_ratio_num = four.word_ops;
        prev_ratio_den = naive.word_ops;
    }
}

TEST_CASE("sliced GF(3) add/sub/neg: exhaustive scalar agreement") {
    for (int a : {0, 1, -1}) {
        for (int b : {0, 1, -1}) {
            SlicedF3Vector x = slice_of({a}), y = slice_of({b});
            SlicedF3Vector s = f3_add(x, y);
            CHECK(s.valid_encoding());
            CHECK(s.get(0) == mod3_balanced(a + b));
            SlicedF3Vector d = f3_sub(x, y);
            CHECK(d.valid_encoding());
            CHECK(d.get(0) == mod3_balanced(a - b));
        }
        SlicedF3Vector x = slice_of({a});
        SlicedF3Vector n = f3_neg(x);
        CHECK(n.valid_encoding());
        CHECK(n.get(0) == mod3_balanced(-a));
        CHECK(f3_neg(n).get(0) == a);  // involution
    }
}

TEST_CASE("sliced GF(3) word-operation counts are 6/6/1") {
    SlicedF3Vector x(64), y(64);  // exactly one word
    for (int i = 0; i < 64; ++i) {
        x.set(i, (i % 3) - 1);
        y.set(i, ((i + 1) % 3) - 1);
    }
    TinyStats add_ops, sub_ops, neg_ops;
    f3_add(x, y, &add_ops);
    f3_sub(x, y, &sub_ops);
    f3_neg(x, &neg_ops);
    CHECK(add_ops.word_ops == 6);
    CHECK(sub_ops.word_ops == 6);
    CHECK(neg_ops.word_ops == 1);
}

TEST_CASE("sliced GF(3) identities and closure on random vectors") {
    std::mt19937_64 rng(74);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + rng() % 300;
        std::vector<int> va(n), vb(n);
        for (auto& e : va) e = static_cast<int>(rng() % 3) - 1;
        for (auto& e : vb) e = static_cast<int>(rng() % 3) - 1;
        SlicedF3Vector x = slice_of(va), y = slice_of(vb), z(n);

        SlicedF3Vector s = f3_add(x, y), d = f3_sub(x, y), g = f3_neg(x);
        CHECK(s.valid_encoding());
        CHECK(d.valid_encoding());
        CHECK(g.valid_encoding());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s.get(i) == mod3_balanced(va[i] + vb[i]));
            CHECK(d.get(i) == mod3_balanced(va[i] - vb[i]));
            CHECK(g.get(i) == mod3_balanced(-va[i]));
        }
        // x + 0 = x and x - x = 0
        SlicedF3Vector xz = f3_add(x, z);
        SlicedF3Vector xx = f3_sub(x, x);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(xz.get(i) == va[i]);
            CHECK(xx.get(i) == 0);
        }
    }
}

TEST_CASE("encoding closure on ten thousand random word-length vectors") {
    std::mt19937_64 rng(78);
    for (int t = 0; t < 10000; ++t) {
        SlicedF3Vector x(64), y(64);
        for (int i = 0; i < 64; ++i) {
            x.set(i, static_cast<int>(rng() % 3) - 1);
            y.set(i, static_cast<int>(rng() % 3) - 1);
        }
        CHECK(f3_add(x, y).valid_encoding());
        CHECK(f3_sub(x, y).valid_encoding());
        CHECK(f3_neg(x).valid_encoding());
    }
}

TEST_CASE("GF(3) row-combination matrix product") {
    std::mt19937_64 rng(75);
    const std::size_t m = 9, n = 7, cols = 130;
    std::vector<std::vector<int>> A(m, std::vector<int>(n));
    for (auto& row : A)
        for (auto& e : row) e = static_cast<int>(rng() % 3) - 1;
    std::vector<SlicedF3Vector> B;
    std::vector<std::vector<int>> Braw(n, std::vector<int>(cols));
    for (std::size_t j = 0; j < n; ++j) {
        for (auto& e : Braw[j]) e = static_cast<int>(rng() % 3) - 1;
        B.push_back(slice_of(Braw[j]));
    }
    auto C = f3_mm(A, B);
    REQUIRE(C.size() == m);
    for (std::size_t i = 0; i < m; ++i) {
        CHECK(C[i].valid_encoding());
        for (std::size_t c = 0; c < cols; ++c) {
            long acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += A[i][j] * Braw[j][c];
            CHECK(C[i].get(c) == mod3_balanced(acc));
        }
    }
}

TEST_CASE("kronecker packing round-trips and adds positionwise") {
    std::mt19937_64 rng(76);
    const std::int64_t p = 37;
    PrimeField F(p, Rep::Unsigned);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 1 + rng() % 50;
        std::vector<std::int64_t> v(n), w(n);
        for (auto& e : v) e = static_cast<std::int64_t>(rng() % p);
        for (auto& e : w) e = static_cast<std::int64_t>(rng() % p);
        PackedInt P = kron_pack(v, 16);
        CHECK(kron_unpack(P) == v);

        PackedInt S = packed_add(P, kron_pack(w, 16));
        PackedInt R = simultaneous_reduce(S, p);
        std::vector<std::int64_t> back = kron_unpack(R);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(back[i] == F.add(v[i], w[i]));
    }
    CHECK(kron_pack({}, 8).value == 0);
    CHECK(kron_pack({0, 0, 0}, 8).value == 0);
}

TEST_CASE("simultaneous_reduce maps each slot to its residue") {
    const std::int64_t p = 11;
    std::vector<std::int64_t> raw{11, 12, 21, 3, 0};
    PackedInt P = kron_pack(raw, 8);
    std::vector<std::int64_t> red = kron_unpack(simultaneous_reduce(P, p));
    CHECK(red == std::vector<std::int64_t>{0, 1, 10, 3, 0});

    // already-reduced slots are unchanged
    std::vector<std::int64_t> can{0, 1, 10, 3, 0};
    PackedInt Q = kron_pack(can, 8);
    CHECK(kron_unpack(simultaneous_reduce(Q, p)) == can);

    std::mt19937_64 rng(77);
    for (int t = 0; t < 50; ++t) {
        std::size_t n = 1 + rng() % 40;
        std::vector<std::int64_t> v(n);
        for (auto& e : v) e = static_cast<std::int64_t>(rng() % 4096);
        PackedInt R = kron_pack(v, 13);
        auto out = kron_unpack(simultaneous_reduce(R, p));
        for (std::size_t i = 0; i < n; ++i) CHECK(out[i] == v[i] % p);
    }
}
