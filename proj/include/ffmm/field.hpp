// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ffmm {

// Instrumentation for the exact operation-count laws.  Counts are plain
// tallies of scalar events; callers merge per-task counters after a join.
struct OpCounter {
    std::uint64_t mults = 0;
    std::uint64_t adds = 0;
    std::uint64_t reductions = 0;
    std::uint64_t row_adds = 0;

    OpCounter& operator+=(const OpCounter& o) {
        mults += o.mults;
        adds += o.adds;
        reductions += o.reductions;
        row_adds += o.row_adds;
        return *this;
    }
    std::uint64_t field_ops() const { return mults + adds; }
};

struct FieldMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotInvertibleError : std::domain_error {
    using std::domain_error::domain_error;
};
struct InvalidModulusError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BoundError : std::domain_error {
    using std::domain_error::domain_error;
};

// Residue representation convention.
enum class Rep {
    Balanced,  // {-(p-1)/2 .. (p-1)/2}
    Unsigned,  // {0 .. p-1}
};

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// Z/pZ for an odd word-size prime p.  Immutable after construction; safe to
// share across threads.
class PrimeField {
public:
    explicit PrimeField(std::int64_t p, Rep rep = Rep::Balanced,
                        int mantissa_bits = 63);

    std::int64_t modulus() const { return p_; }
    Rep rep() const { return rep_; }
    int mantissa_bits() const { return mantissa_bits_; }
    std::int64_t half() const { return half_; }  // (p-1)/2

    bool is_canonical(std::int64_t v) const {
        return rep_ == Rep::Balanced ? (v >= -half_ && v <= half_)
                                     : (v >= 0 && v < p_);
    }

    // Canonical residue of an arbitrary integer.
    std::int64_t reduce(__int128 x) const;

    // All four take and return canonical residues.
    std::int64_t add(std::int64_t a, std::int64_t b) const;
    std::int64_t sub(std::int64_t a, std::int64_t b) const;
    std::int64_t mul(std::int64_t a, std::int64_t b) const;
    std::int64_t neg(std::int64_t a) const;
    std::int64_t inv(std::int64_t a) const;  // throws NotInvertibleError on 0

    std::int64_t from_int(std::int64_t x) const { return reduce(x); }

    bool operator==(const PrimeField& o) const {
        return p_ == o.p_ && rep_ == o.rep_;
    }

private:
    std::int64_t p_;
    std::int64_t half_;
    Rep rep_;
    int mantissa_bits_;
};

// A single residue tied to its field; the scalar-level convenience API.
struct FieldElem {
    std::int64_t value = 0;
    const PrimeField* field = nullptr;

    bool operator==(const FieldElem& o) const {
        return value == o.value && field == o.field;
    }
};

enum class ArithOp { Add, Sub, Mul, Neg };

FieldElem ff_arith(const FieldElem& a, const FieldElem& b, ArithOp op,
                   OpCounter* ops = nullptr);
FieldElem ff_inv(const FieldElem& a, OpCounter* ops = nullptr);

// Largest inner-dimension k such that a dot product of length k over
// canonical residues can be accumulated in an m-bit integer type with a
// single final reduction, after `levels` recursive 2x2 cuts.  levels = 0
// uses k*M^2 < 2^m and levels = l uses 9^l * floor(k/2^l) * M^2 < 2^m,
// where M is the largest residue magnitude of the representation.
// Throws BoundError when no k >= 1 qualifies.
std::int64_t delayed_bound(std::int64_t p, int mantissa_bits, int levels,
                           Rep rep = Rep::Balanced);

// Exact dot product of two canonical residue vectors with delayed reduction:
// at most ceil(len / delayed_bound(p, m, 0)) flushes, each counted as one
// reduction.  Strides allow row/column access inside matrices.
std::int64_t delayed_dot(const std::int64_t* u, std::size_t ustride,
                         const std::int64_t* v, std::size_t vstride,
                         std::size_t len, const PrimeField& F,
                         OpCounter* ops = nullptr);

// Same, but the accumulator is flushed every `chunk` terms (chunk >= 1).
std::int64_t delayed_dot_chunked(const std::int64_t* u, std::size_t ustride,
                                 const std::int64_t* v, std::size_t vstride,
                                 std::size_t len, const PrimeField& F,
                                 std::int64_t chunk, OpCounter* ops = nullptr);

}  // namespace ffmm
