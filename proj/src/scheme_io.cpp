#include "ffmm/scheme_io.hpp"

#include <fstream>
#include <sstream>

namespace ffmm {

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << r.get_num();
    if (r.get_den() != 1) os << '/' << r.get_den();
    return os.str();
}

Rational parse_rational(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    if (t.empty()) throw ParseError("empty rational literal");
    Rational r;
    if (r.set_str(t, 10) != 0)
        throw ParseError("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

std::string laurent_to_string(const LaurentPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [power, coeff] : p.coeffs()) {
        std::string cs = rational_to_string(coeff);
        if (!first && cs[0] != '-') os << '+';
        first = false;
        if (power == 0) {
            os << cs;
            continue;
        }
        if (coeff == 1)
            ;
        else if (coeff == -1)
            os << '-';
        else
            os << cs << '*';
        os << 'L';
        if (power != 1) os << '^' << power;
    }
    return os.str();
}

LaurentPoly parse_laurent(const std::string& s) {
    if (s.empty()) throw ParseError("empty coefficient literal");
    LaurentPoly out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t start = i;
        if (s[i] == '+' || s[i] == '-') ++i;
        while (i < s.size() && s[i] != '+' && s[i] != '-') ++i;
        // '-' inside an exponent (L^-1) belongs to the current term
        while (i < s.size() && s[i - 1] == '^') {
            ++i;
            while (i < s.size() && s[i] != '+' && s[i] != '-') ++i;
        }
        std::string term = s.substr(start, i - start);
        if (term.empty() || term == "+" || term == "-")
            throw ParseError("bad polynomial literal: " + s);
        Rational coeff(1);
        int power = 0;
        std::size_t lpos = term.find('L');
        if (lpos == std::string::npos) {
            coeff = parse_rational(term);
        } else {
            std::string cpart = term.substr(0, lpos);
            if (!cpart.empty() && cpart.back() == '*')
                cpart.pop_back();
            if (cpart.empty() || cpart == "+")
                coeff = 1;
            else if (cpart == "-")
                coeff = -1;
            else
                coeff = parse_rational(cpart);
            std::string ppart = term.substr(lpos + 1);
            if (ppart.empty()) {
                power = 1;
            } else {
                if (ppart[0] != '^')
                    throw ParseError("bad polynomial literal: " + s);
                power = std::stoi(ppart.substr(1));
            }
        }
        out = out + LaurentPoly::term(coeff, power);
    }
    return out;
}

namespace {

bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        if (line[i] == '#') continue;
        return true;
    }
    return false;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream iss(line);
    std::vector<std::string> toks;
    std::string t;
    while (iss >> t) toks.push_back(t);
    return toks;
}

template <typename T, typename Parse>
Mat<T> read_block(std::istream& is, std::size_t rows, std::size_t cols,
                  Parse parse, const char* what) {
    Mat<T> M(rows, cols);
    std::string line;
    for (std::size_t q = 0; q < rows; ++q) {
        if (!next_data_line(is, line))
            throw ParseError(std::string("scheme file: missing row in ") +
                             what);
        auto toks = tokens_of(line);
        if (toks.size() != cols)
            throw ParseError(std::string("scheme file: bad entry count in ") +
                             what);
        for (std::size_t j = 0; j < cols; ++j) M(q, j) = parse(toks[j]);
    }
    return M;
}

}  // namespace

void write_scheme(std::ostream& os, const BilinearScheme& s) {
    if (!s.is_mm())
        throw SchemeError("scheme file format covers MM schemes only");
    os << s.m() << ' ' << s.n() << ' ' << s.p() << ' ' << s.rank() << '\n';
    for (std::size_t q = 0; q < s.rank(); ++q) {
        for (std::size_t j = 0; j < s.nu(); ++j)
            os << (j ? " " : "") << rational_to_string(s.A()(q, j));
        os << '\n';
    }
    for (std::size_t q = 0; q < s.rank(); ++q) {
        for (std::size_t j = 0; j < s.nv(); ++j)
            os << (j ? " " : "") << rational_to_string(s.B()(q, j));
        os << '\n';
    }
    for (std::size_t q = 0; q < s.rank(); ++q) {
        for (std::size_t j = 0; j < s.nx(); ++j)
            os << (j ? " " : "") << rational_to_string(s.C()(j, q));
        os << '\n';
    }
}

void write_apa_scheme(std::ostream& os, const ApaScheme& a) {
    if (!a.mm_dims)
        throw SchemeError("scheme file format covers MM schemes only");
    const auto [m, n, p] = *a.mm_dims;
    os << m << ' ' << n << ' ' << p << ' ' << a.border_rank() << " apa\n";
    auto dump = [&os](const LMat& M) {
        for (std::size_t q = 0; q < M.rows(); ++q) {
            for (std::size_t j = 0; j < M.cols(); ++j)
                os << (j ? " " : "") << laurent_to_string(M(q, j));
            os << '\n';
        }
    };
    dump(a.F1);
    dump(a.F2);
    // stored product-major like C: transpose of the (k,i) indexing
    const std::size_t r = a.border_rank();
    for (std::size_t q = 0; q < r; ++q) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < p; ++k)
                os << ((i + k) ? " " : "")
                   << laurent_to_string(a.F3(q, k * m + i));
        os << '\n';
    }
}

BilinearScheme read_scheme(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line)) throw ParseError("empty scheme file");
    auto toks = tokens_of(line);
    if (toks.size() != 4 && !(toks.size() == 5 && toks[4] == "apa"))
        throw ParseError("scheme file: bad header");
    if (toks.size() == 5)
        throw ParseError("scheme file is APA; use read_scheme_any");
    std::size_t m = std::stoul(toks[0]), n = std::stoul(toks[1]),
                p = std::stoul(toks[2]), r = std::stoul(toks[3]);
    auto parse = [](const std::string& t) { return parse_rational(t); };
    QMat A = read_block<Rational>(is, r, m * n, parse, "A");
    QMat B = read_block<Rational>(is, r, n * p, parse, "B");
    QMat Ct = read_block<Rational>(is, r, m * p, parse, "C");
    QMat C(m * p, r);
    for (std::size_t q = 0; q < r; ++q)
        for (std::size_t o = 0; o < m * p; ++o) C(o, q) = Ct(q, o);
    return BilinearScheme(m, n, p, std::move(A), std::move(B), std::move(C));
}

ApaScheme read_scheme_any(std::istream& is, bool& apa) {
    std::string line;
    if (!next_data_line(is, line)) throw ParseError("empty scheme file");
    auto toks = tokens_of(line);
    if (toks.size() != 4 && !(toks.size() == 5 && toks[4] == "apa"))
        throw ParseError("scheme file: bad header");
    apa = toks.size() == 5;
    std::size_t m = std::stoul(toks[0]), n = std::stoul(toks[1]),
                p = std::stoul(toks[2]), r = std::stoul(toks[3]);
    auto parse = [](const std::string& t) { return parse_laurent(t); };
    LMat F1 = read_block<LaurentPoly>(is, r, m * n, parse, "A");
    LMat F2 = read_block<LaurentPoly>(is, r, n * p, parse, "B");
    LMat Ct = read_block<LaurentPoly>(is, r, m * p, parse, "C");
    ApaScheme a;
    a.mm_dims = {{m, n, p}};
    a.target = TriTarget::mm_trace(m, n, p);
    a.F1 = std::move(F1);
    a.F2 = std::move(F2);
    a.F3 = LMat(r, p * m);
    for (std::size_t q = 0; q < r; ++q)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < p; ++k)
                a.F3(q, k * m + i) = Ct(q, i * p + k);
    return a;
}

BilinearScheme load_scheme_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open scheme file " + path);
    return read_scheme(is);
}

void save_scheme_file(const std::string& path, const BilinearScheme& s) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot write scheme file " + path);
    write_scheme(os, s);
}

}  // namespace ffmm
