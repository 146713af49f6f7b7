#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>

#include "core.hpp"

namespace wiener {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact complex number with rational parts.
struct QComplex {
    Rational re{0};
    Rational im{0};

    QComplex() = default;
    QComplex(Rational r) : re(std::move(r)) {}
    QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    QComplex(int r) : re(r) {}

    bool is_zero() const { return re == 0 && im == 0; }

    QComplex& operator+=(const QComplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    QComplex& operator-=(const QComplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    QComplex& operator*=(const QComplex& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
    friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
    friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
    friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
    friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }
};

inline QComplex conj(const QComplex& z) { return {z.re, -z.im}; }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline Complex to_complex(const QComplex& z) { return {to_double(z.re), to_double(z.im)}; }

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rational_pow(const Rational& base, unsigned k) {
    Rational out(1), b(base);
    while (k) {
        if (k & 1u) out *= b;
        b *= b;
        k >>= 1u;
    }
    return out;
}

inline std::string rational_to_string(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Parses "p/q", an integer, or a plain decimal such as "-0.125" or "1e-3" exactly.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    if (s.empty()) throw PreconditionError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt p(s.substr(0, slash));
            BigInt q(s.substr(slash + 1));
            if (q == 0) throw PreconditionError("zero denominator in '" + text + "'");
            return Rational(p, q);
        }
        bool neg = false;
        std::size_t i = 0;
        if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
        std::string digits;
        long exp10 = 0;
        bool seen_dot = false;
        for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
            if (s[i] == '.') {
                if (seen_dot) throw PreconditionError("bad decimal '" + text + "'");
                seen_dot = true;
            } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
                digits.push_back(s[i]);
                if (seen_dot) --exp10;
            } else {
                throw PreconditionError("bad decimal '" + text + "'");
            }
        }
        if (i < s.size()) exp10 += std::stol(s.substr(i + 1));
        if (digits.empty()) throw PreconditionError("bad decimal '" + text + "'");
        BigInt mant(digits);
        if (neg) mant = -mant;
        BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exp10)));
        return exp10 >= 0 ? Rational(mant * ten_pow) : Rational(mant, ten_pow);
    } catch (const PreconditionError&) {
        throw;
    } catch (const std::exception&) {
        throw PreconditionError("bad rational literal '" + text + "'");
    }
}

// Exact rational equal to a finite double.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw PreconditionError("non-finite value has no rational form");
    if (x == 0.0) return Rational(0);
    int e = 0;
    double m = std::frexp(x, &e);
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    e -= 53;
    BigInt num(mant);
    if (e >= 0) return Rational(num << e);
    return Rational(num, BigInt(1) << (-e));
}

}  // namespace wiener
