// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include "ffmm/dense.hpp"
#include "ffmm/field.hpp"
#include "ffmm/multiply.hpp"

namespace ffmm {

struct GenericRankProfileViolation : std::domain_error {
    using std::domain_error::domain_error;
};

struct LuResult {
    ElemMat L;  // unit lower triangular
    ElemMat U;  // upper triangular, invertible diagonal
};

// Multiplication-call accounting for the cost-routing checks: mm_mults is
// the share of the mult counter spent inside mm_fast/mm_fast_acc calls.
struct FactorStats {
    std::uint64_t mm_mults = 0;
};

// Solve U X = B (U upper triangular, invertible diagonal).
ElemMat trsm_upper(ConstElemView U, ConstElemView B, const PrimeField& F,
                   const CascadeConfig& cfg = {}, OpCounter* ops = nullptr,
                   FactorStats* stats = nullptr);
// Solve L X = B (L lower triangular, invertible diagonal).
ElemMat trsm_lower(ConstElemView L, ConstElemView B, const PrimeField& F,
                   const CascadeConfig& cfg = {}, OpCounter* ops = nullptr,
                   FactorStats* stats = nullptr);

// A = L U for a square matrix with generic rank profile (all leading
// principal minors invertible); violations throw.
LuResult lu(ConstElemView A, const PrimeField& F, const CascadeConfig& cfg = {},
            OpCounter* ops = nullptr, FactorStats* stats = nullptr);

std::int64_t det(ConstElemView A, const PrimeField& F,
                 const CascadeConfig& cfg = {}, OpCounter* ops = nullptr);
ElemMat inverse(ConstElemView A, const PrimeField& F,
                const CascadeConfig& cfg = {}, OpCounter* ops = nullptr);

}  // namespace ffmm
