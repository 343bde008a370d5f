// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <gmpxx.h>

#include <map>
#include <string>

namespace ffmm {

using Rational = mpq_class;
using BigInt = mpz_class;

// Laurent polynomial in one indeterminate over Q; only nonzero coefficients
// are stored.  Used for the coefficient entries of APA schemes.
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(const Rational& c) {
        if (c != 0) c_[0] = c;
    }
    LaurentPoly(long c) {
        if (c != 0) c_[0] = Rational(c);
    }
    static LaurentPoly term(const Rational& c, int power) {
        LaurentPoly p;
        if (c != 0) p.c_[power] = c;
        return p;
    }

    bool is_zero() const { return c_.empty(); }
    bool is_constant() const {
        return c_.empty() || (c_.size() == 1 && c_.begin()->first == 0);
    }
    int min_power() const { return c_.empty() ? 0 : c_.begin()->first; }
    int max_power() const { return c_.empty() ? 0 : c_.rbegin()->first; }
    Rational coeff(int power) const {
        auto it = c_.find(power);
        return it == c_.end() ? Rational(0) : it->second;
    }
    const std::map<int, Rational>& coeffs() const { return c_; }

    LaurentPoly operator+(const LaurentPoly& o) const {
        LaurentPoly r = *this;
        for (const auto& [p, c] : o.c_) {
            Rational s = r.coeff(p) + c;
            if (s == 0)
                r.c_.erase(p);
            else
                r.c_[p] = s;
        }
        return r;
    }
    LaurentPoly operator-() const {
        LaurentPoly r = *this;
        for (auto& [p, c] : r.c_) c = -c;
        return r;
    }
    LaurentPoly operator-(const LaurentPoly& o) const { return *this + (-o); }
    LaurentPoly operator*(const LaurentPoly& o) const {
        LaurentPoly r;
        for (const auto& [p1, c1] : c_)
            for (const auto& [p2, c2] : o.c_) {
                Rational s = r.coeff(p1 + p2) + c1 * c2;
                if (s == 0)
                    r.c_.erase(p1 + p2);
                else
                    r.c_[p1 + p2] = s;
            }
        return r;
    }
    bool operator==(const LaurentPoly& o) const { return c_ == o.c_; }

    // Value at a nonzero rational point.
    Rational eval(const Rational& x) const {
        Rational v = 0;
        for (const auto& [p, c] : c_) {
            Rational xp = 1;
            int e = p < 0 ? -p : p;
            for (int i = 0; i < e; ++i) xp *= x;
            if (p < 0) xp = 1 / xp;
            v += c * xp;
        }
        return v;
    }

private:
    std::map<int, Rational> c_;
};

std::string rational_to_string(const Rational& r);
std::string laurent_to_string(const LaurentPoly& p);
Rational parse_rational(const std::string& s);
LaurentPoly parse_laurent(const std::string& s);

}  // namespace ffmm
