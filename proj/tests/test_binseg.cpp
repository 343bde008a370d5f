#include "doctest.h"

#include <random>

#include "ffmm/binseg.hpp"

using namespace ffmm;

namespace {

BigInt dot_oracle(const std::vector<BigInt>& u, const std::vector<BigInt>& v) {
    BigInt s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

std::vector<BigInt> random_vec(std::size_t n, unsigned bits,
                               std::mt19937_64& rng) {
    std::vector<BigInt> v(n);
    std::uniform_int_distribution<unsigned long> d(
        0, (1ull << bits) - 1);
    for (auto& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST_CASE("pack and unpack") {
    std::vector<BigInt> v{1, 2, 3};
    PackedInt P = pack(v, 4);
    CHECK(P.value == 1 + 2 * 16 + 3 * 256);  // 801
    CHECK(unpack(P) == v);

    std::vector<BigInt> z(5, BigInt(0));
    CHECK(pack(z, 7).value == 0);

    std::mt19937_64 rng(61);
    for (unsigned k = 1; k <= 16; ++k) {
        auto w = random_vec(1 + rng() % 64, k, rng);
        CHECK(unpack(pack(w, k)) == w);
    }

    std::vector<BigInt> big{16};
    CHECK_THROWS_AS(pack(big, 4), PackError);
}

TEST_CASE("packed_add tracks the slot slack") {
    std::vector<BigInt> a{7, 7}, b{7, 7};
    PackedInt P = packed_add(pack(a, 4), pack(b, 4));
    CHECK(unpack(P) == std::vector<BigInt>{14, 14});
    // one more addition exceeds the 4-bit slots and is detected on unpack
    PackedInt Q = packed_add(P, pack(b, 4));
    CHECK_THROWS_AS(unpack(Q), PackError);
}

TEST_CASE("binseg_inner examples") {
    std::vector<BigInt> u{1, 2, 3}, v{4, 5, 6};
    BinsegStats stats;
    CHECK(binseg_inner(u, v, 2, 3, &stats) == 32);
    CHECK(stats.big_mults == 1);  // single big-integer multiplication

    std::vector<BigInt> zero(3, BigInt(0));
    CHECK(binseg_inner(zero, v, 2, 3) == 0);
    CHECK(binseg_inner(u, zero, 2, 3) == 0);

    // all-ones left vector sums the right one
    std::vector<BigInt> ones(5, BigInt(1)), w{9, 8, 7, 6, 5};
    CHECK(binseg_inner(ones, w, 1, 4) == 35);
}

TEST_CASE("binseg_inner bound violations are rejected") {
    std::vector<BigInt> u{4}, v{1};
    CHECK_THROWS_AS(binseg_inner(u, v, 2, 3), PackError);
    CHECK_THROWS_AS(binseg_inner(v, u, 3, 2), PackError);
}

TEST_CASE("binseg_sum") {
    std::vector<BigInt> v{5, 7, 9};
    CHECK(binseg_sum(v, 4) == 21);
    CHECK(binseg_sum({}, 4) == 0);

    // n copies of 2^h - 1: carries stay inside slots of width h + log2(n)
    for (unsigned h : {1u, 4u, 9u}) {
        for (std::size_t n : {1u, 3u, 16u, 200u}) {
            std::vector<BigInt> w(n, (BigInt(1) << h) - 1);
            CHECK(binseg_sum(w, h) ==
                  BigInt(static_cast<unsigned long>(n)) *
                      ((BigInt(1) << h) - 1));
        }
    }
}

TEST_CASE("binseg_sum_signed") {
    std::vector<BigInt> v{-2, 0, 3};
    CHECK(binseg_sum_signed(v, BigInt(-2), BigInt(4)) == 1);

    std::vector<BigInt> allq(7, BigInt(-5));
    CHECK(binseg_sum_signed(allq, BigInt(-5), BigInt(1)) == -35);

    CHECK_THROWS_AS(binseg_sum_signed(v, BigInt(0), BigInt(4)), PackError);
    CHECK_THROWS_AS(binseg_sum_signed(v, BigInt(2), BigInt(1)), PackError);
}

TEST_CASE("signed inner product via the double-shift identity") {
    // u^T v = (u-q1)^T (v-q2) + q2 sum(u) + q1 sum(v) - n q1 q2,
    // the shifted pieces all computed by binary segmentation.
    std::mt19937_64 rng(62);
    std::uniform_int_distribution<long> d(-100, 99);
    for (int t = 0; t < 50; ++t) {
        std::size_t n = 1 + rng() % 40;
        std::vector<BigInt> u(n), v(n);
        for (auto& x : u) x = d(rng);
        for (auto& x : v) x = d(rng);
        const BigInt q1(-100), r1(100), q2(-100), r2(100);
        std::vector<BigInt> us(n), vs(n);
        for (std::size_t i = 0; i < n; ++i) {
            us[i] = u[i] - q1;
            vs[i] = v[i] - q2;
        }
        unsigned g = 8, h = 8;  // spans 200 < 256
        BigInt shifted = binseg_inner(us, vs, g, h);
        BigInt sum_u = binseg_sum_signed(u, q1, r1);
        BigInt sum_v = binseg_sum_signed(v, q2, r2);
        BigInt got = shifted + q2 * sum_u + q1 * sum_v -
                     BigInt(static_cast<unsigned long>(n)) * q1 * q2;
        CHECK(got == dot_oracle(u, v));
    }
}

TEST_CASE("random instances match the direct oracle") {
    std::mt19937_64 rng(63);
    for (int t = 0; t < 2000; ++t) {
        unsigned g = 1 + rng() % 12, h = 1 + rng() % 12;
        std::size_t n = 1 + rng() % 256;
        auto u = random_vec(n, g, rng);
        auto v = random_vec(n, h, rng);
        CHECK(binseg_inner(u, v, g, h) == dot_oracle(u, v));
    }
    for (int t = 0; t < 500; ++t) {
        unsigned h = 1 + rng() % 12;
        std::size_t n = 1 + rng() % 256;
        auto v = random_vec(n, h, rng);
        BigInt s = 0;
        for (const auto& x : v) s += x;
        CHECK(binseg_sum(v, h) == s);
    }
}

TEST_CASE("one bit short of the slot bound corrupts the maximal instance") {
    // adversarial: every entry maximal, slot width k-1
    const unsigned g = 4, h = 4;
    const std::size_t n = 8;
    std::vector<BigInt> u(n, BigInt(15)), v(n, BigInt(15));
    const unsigned k = g + h + ceil_log2(n);
    CHECK(binseg_inner_with_slot(u, v, k) == dot_oracle(u, v));
    CHECK(binseg_inner_with_slot(u, v, k - 1) != dot_oracle(u, v));
}
