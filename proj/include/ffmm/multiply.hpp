// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ffmm/dense.hpp"
#include "ffmm/field.hpp"

namespace ffmm {

class BilinearScheme;  // schemes.hpp

enum class SchemeKind { Winograd, Strassen, Generic };

struct CascadeConfig {
    std::size_t base_threshold = 64;  // below this, classical kernel
    SchemeKind scheme = SchemeKind::Winograd;
    const BilinearScheme* generic = nullptr;  // used when scheme == Generic
    int max_levels = 64;                      // cap on recursion depth
    unsigned parallel_tasks = 1;
    int mantissa_bits = 63;  // accumulator capacity fed to delayed_bound
};

// Per-level temporary-buffer accounting for the memory-efficient schedules.
struct WorkspaceStats {
    // blocks[l] = number of temporaries allocated at recursion depth l;
    // elems[l] = largest single temporary, in elements, at that depth.
    std::vector<std::uint32_t> blocks;
    std::vector<std::size_t> elems;
    void note(std::size_t level, std::size_t nblocks, std::size_t block_elems) {
        if (blocks.size() <= level) {
            blocks.resize(level + 1, 0);
            elems.resize(level + 1, 0);
        }
        if (nblocks > blocks[level])
            blocks[level] = static_cast<std::uint32_t>(nblocks);
        if (block_elems > elems[level]) elems[level] = block_elems;
    }
};

// C = A*B, classical triple loop on delayed-reduction dot products.
// mult counter is exactly m*n*p, add counter m*p*(n-1).
ElemMat mm_classic(ConstElemView A, ConstElemView B, const PrimeField& F,
                   OpCounter* ops = nullptr);
// acc_mode: 0 overwrite, +1 accumulate, -1 subtract.
void mm_classic_into(ElemView C, ConstElemView A, ConstElemView B,
                     const PrimeField& F, OpCounter* ops = nullptr,
                     int depth = 0, int mantissa_bits = 63, int acc_mode = 0);

// Waksman's commutative product; the inner dimension must be even.
// Exactly 0.5*m*n*p + (m+p)*n/2 multiplications; row correction terms are
// computed once per row of A, column terms once per column of B.
ElemMat mm_waksman(ConstElemView A, ConstElemView B, const PrimeField& F,
                   OpCounter* ops = nullptr);

using BlockMul = std::function<void(ElemView, ConstElemView, ConstElemView)>;

// One 2x2 step of the fast schemes on even-dimension inputs, multiplying
// blocks through `mul`.  Exactly 7 block products; 15 (Winograd) or 18
// (Strassen) block additions; two quarter-size temporaries.
void winograd_step(ElemView X, ConstElemView U, ConstElemView V,
                   const PrimeField& F, const BlockMul& mul,
                   OpCounter* ops = nullptr, WorkspaceStats* ws = nullptr,
                   std::size_t level = 0);
void strassen_step(ElemView X, ConstElemView U, ConstElemView V,
                   const PrimeField& F, const BlockMul& mul,
                   OpCounter* ops = nullptr, WorkspaceStats* ws = nullptr,
                   std::size_t level = 0);

// Recursive fast multiplication with dynamic peeling of odd fringes.
ElemMat mm_fast(ConstElemView A, ConstElemView B, const PrimeField& F,
                const CascadeConfig& cfg = {}, OpCounter* ops = nullptr,
                WorkspaceStats* ws = nullptr);

// C <- beta*C + A*B with beta in {0, 1, -1}; at most two quarter-size
// temporaries per recursion level.
void mm_fast_acc(ElemView C, ConstElemView A, ConstElemView B, int beta,
                 const PrimeField& F, const CascadeConfig& cfg = {},
                 OpCounter* ops = nullptr, WorkspaceStats* ws = nullptr);

// Task-parallel product: recursively splits the larger of A's row dimension
// and B's column dimension into independent tasks, each running sequential
// mm_fast on a disjoint output window.  Output is identical to mm_fast.
// split_trace, when given, records each cut as 'R' (rows of A) or 'C'
// (columns of B).
ElemMat mm_parallel(ConstElemView A, ConstElemView B, const PrimeField& F,
                    const CascadeConfig& cfg = {}, OpCounter* ops = nullptr,
                    std::vector<char>* split_trace = nullptr);

}  // namespace ffmm
