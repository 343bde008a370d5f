// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <iosfwd>
#include <string>

#include "ffmm/schemes.hpp"

namespace ffmm {

struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Text scheme format.  Header "m n p r" (plain) or "m n p r apa", then the
// A, B and C coefficient blocks, one product per line: r lines of m*n
// entries, r lines of n*p entries, r lines of m*p entries.  Entries are
// rationals "num" or "num/den"; APA entries are polynomials in L such as
// "1+2*L^2-1/2*L^-1".  Blank lines and lines starting with '#' are skipped.
void write_scheme(std::ostream& os, const BilinearScheme& s);
BilinearScheme read_scheme(std::istream& is);

void write_apa_scheme(std::ostream& os, const ApaScheme& a);
// Reads either form; `apa` reports which one was found, and exact files are
// returned with degree-0 coefficients.
ApaScheme read_scheme_any(std::istream& is, bool& apa);

BilinearScheme load_scheme_file(const std::string& path);
void save_scheme_file(const std::string& path, const BilinearScheme& s);

}  // namespace ffmm
