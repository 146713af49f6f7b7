#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <vector>

#include "rational.hpp"

namespace wiener {

// Finitely many (position, mass) atoms.
template <class Pos, class Mass>
struct AtomicMeasure {
    std::vector<Pos> positions;
    std::vector<Mass> masses;

    std::size_t size() const { return positions.size(); }
};

using RationalMeasure = AtomicMeasure<Rational, Rational>;
using RealMeasure = AtomicMeasure<double, double>;

inline Rational total_variation(const RationalMeasure& m) {
    Rational tv(0);
    for (const auto& x : m.masses) tv += rational_abs(x);
    return tv;
}

inline double total_variation(const RealMeasure& m) {
    double tv = 0.0;
    for (double x : m.masses) tv += std::fabs(x);
    return tv;
}

// int s^k d rho, exactly.
inline Rational moment(const RationalMeasure& m, unsigned k) {
    Rational acc(0);
    for (std::size_t j = 0; j < m.size(); ++j) acc += m.masses[j] * rational_pow(m.positions[j], k);
    return acc;
}

inline double moment(const RealMeasure& m, unsigned k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) acc += m.masses[j] * std::pow(m.positions[j], static_cast<double>(k));
    return acc;
}

// All moments 0..kmax with incremental powers.
inline std::vector<Rational> moments(const RationalMeasure& m, unsigned kmax) {
    std::vector<Rational> out(kmax + 1, Rational(0));
    for (std::size_t j = 0; j < m.size(); ++j) {
        Rational p(1);
        for (unsigned k = 0; k <= kmax; ++k) {
            out[k] += m.masses[j] * p;
            p *= m.positions[j];
        }
    }
    return out;
}

struct KahaneResult {
    RationalMeasure rho;
    int n = 0;
    Rational h;
    double c_I = 0.0;
    Rational tv;
    double tv_bound = 0.0;      // (2eb/(b-a))^{n-1}
    bool tv_within_bound = false;
    double delta_power = 0.0;  // delta^{-c_I}
};

inline int kahane_atom_count(const Rational& b, double delta) {
    const double bd = to_double(b);
    const double x = std::log(1.0 / delta) / std::log(1.0 / (2.0 * bd));
    int n = static_cast<int>(std::ceil(x - 1e-12));
    return std::max(n, 1);
}

// Equally spaced knots in (a, b) and masses L_j(0) of the Lagrange basis: int d rho = 1 and
// int s^k d rho = 0 for 1 <= k <= n-1.
inline KahaneResult build_rho(const Rational& a, const Rational& b, double delta) {
    require(a > 0 && a < b, "build_rho: need 0 < a < b");
    require(b < Rational(1, 2), "build_rho: need b < 1/2");
    require(delta > 0.0 && delta < 1.0, "build_rho: need 0 < delta < 1");
    KahaneResult r;
    r.n = kahane_atom_count(b, delta);
    const int n = r.n;
    r.h = (b - a) / n;
    std::vector<Rational> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = a + (Rational(2 * j + 1, 2)) * r.h;
    r.rho.positions = s;
    r.rho.masses.assign(static_cast<std::size_t>(n), Rational(1));
    for (int j = 0; j < n; ++j) {
        Rational m(1);
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            m *= s[static_cast<std::size_t>(i)] / (s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(j)]);
        }
        r.rho.masses[static_cast<std::size_t>(j)] = m;
    }
    r.tv = total_variation(r.rho);
    using HP = boost::multiprecision::cpp_dec_float_50;
    const HP e = boost::multiprecision::exp(HP(1));
    const HP ratio = HP(2) * e * HP(b) / (HP(b) - HP(a));
    const HP bound = boost::multiprecision::pow(ratio, n - 1);
    r.tv_bound = bound.convert_to<double>();
    r.tv_within_bound = HP(r.tv) <= bound;
    const double bd = to_double(b), ad = to_double(a);
    r.c_I = std::log(2.0 * std::exp(1.0) * bd / (bd - ad)) / std::log(1.0 / (2.0 * bd));
    r.delta_power = std::pow(delta, -r.c_I);
    return r;
}

}  // namespace wiener
