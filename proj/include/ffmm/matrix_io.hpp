// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <iosfwd>
#include <string>

#include "ffmm/dense.hpp"
#include "ffmm/field.hpp"
#include "ffmm/rational.hpp"

namespace ffmm {

// Dense matrix text format: first line "rows cols modulus" (modulus 0 means
// integer entries), then row-major whitespace-separated decimal entries.
struct MatrixFile {
    std::size_t rows = 0, cols = 0;
    std::int64_t modulus = 0;
    Mat<BigInt> entries;

    // Residue image; requires modulus > 0.
    ElemMat to_residues(const PrimeField& F) const;
    static MatrixFile from_residues(ConstElemView M, std::int64_t modulus);
    static MatrixFile from_integers(const Mat<BigInt>& M);
};

MatrixFile read_matrix(std::istream& is);
void write_matrix(std::ostream& os, const MatrixFile& m);
MatrixFile load_matrix_file(const std::string& path);
void save_matrix_file(const std::string& path, const MatrixFile& m);

}  // namespace ffmm
