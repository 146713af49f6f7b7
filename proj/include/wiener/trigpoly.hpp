#pragma once

#include <map>
#include <type_traits>
#include <vector>

#include "core.hpp"
#include "fft.hpp"
#include "rational.hpp"

namespace wiener {

inline bool coeff_is_zero(const Complex& c) { return c == Complex{}; }
inline bool coeff_is_zero(const QComplex& c) { return c.is_zero(); }
inline Complex coeff_conj(const Complex& c) { return std::conj(c); }
inline QComplex coeff_conj(const QComplex& c) { return conj(c); }
inline Complex as_complex(const Complex& c) { return c; }
inline Complex as_complex(const QComplex& c) { return to_complex(c); }

// Trigonometric polynomial sum_{|n| <= degree} c_n e^{int}, stored densely.
template <class T = Complex>
class TrigPoly {
public:
    using value_type = T;

    TrigPoly() : degree_(0), c_(1, T{}) {}
    explicit TrigPoly(std::int64_t degree) : degree_(degree), c_() {
        require(degree >= 0, "TrigPoly degree must be nonnegative");
        check_coeff_budget(2 * degree + 1, "TrigPoly");
        c_.assign(static_cast<std::size_t>(2 * degree + 1), T{});
    }
    TrigPoly(std::int64_t degree, std::vector<T> dense) : degree_(degree), c_(std::move(dense)) {
        require(degree >= 0 && c_.size() == static_cast<std::size_t>(2 * degree + 1),
                "dense coefficient vector must have length 2*degree+1");
    }

    static TrigPoly constant(T v) {
        TrigPoly p(0);
        p.c_[0] = std::move(v);
        return p;
    }
    static TrigPoly monomial(std::int64_t n, T v) {
        TrigPoly p(n < 0 ? -n : n);
        p.set(n, std::move(v));
        return p;
    }

    std::int64_t degree() const { return degree_; }
    std::size_t size() const { return c_.size(); }

    const T& operator[](std::int64_t n) const {
        static const T zero{};
        if (n < -degree_ || n > degree_) return zero;
        return c_[static_cast<std::size_t>(n + degree_)];
    }
    T coeff(std::int64_t n) const { return (*this)[n]; }
    void set(std::int64_t n, T v) {
        require(n >= -degree_ && n <= degree_, "frequency outside TrigPoly degree");
        c_[static_cast<std::size_t>(n + degree_)] = std::move(v);
    }
    void add(std::int64_t n, const T& v) {
        require(n >= -degree_ && n <= degree_, "frequency outside TrigPoly degree");
        c_[static_cast<std::size_t>(n + degree_)] += v;
    }

    const std::vector<T>& dense() const { return c_; }
    std::vector<T>& dense() { return c_; }

    std::vector<std::int64_t> support() const {
        std::vector<std::int64_t> s;
        for (std::int64_t n = -degree_; n <= degree_; ++n)
            if (!coeff_is_zero((*this)[n])) s.push_back(n);
        return s;
    }
    std::size_t nnz() const {
        std::size_t k = 0;
        for (const auto& v : c_) k += coeff_is_zero(v) ? 0 : 1;
        return k;
    }
    std::int64_t effective_degree() const {
        for (std::int64_t n = degree_; n > 0; --n)
            if (!coeff_is_zero((*this)[n]) || !coeff_is_zero((*this)[-n])) return n;
        return 0;
    }
    bool is_zero() const { return nnz() == 0; }

    bool is_real(double tol = 0.0) const {
        for (std::int64_t n = 0; n <= degree_; ++n) {
            if constexpr (std::is_same_v<T, QComplex>) {
                if ((*this)[n] != coeff_conj((*this)[-n])) return false;
            } else {
                if (std::abs((*this)[n] - std::conj((*this)[-n])) > tol) return false;
            }
        }
        return true;
    }

    // Hermitian part (f + conj(f(-.)))/2, exactly real pointwise.
    TrigPoly real_part() const {
        TrigPoly out(degree_);
        for (std::int64_t n = 0; n <= degree_; ++n) {
            const T c = ((*this)[n] + coeff_conj((*this)[-n])) * T(0.5);
            out.set(n, c);
            out.set(-n, coeff_conj(c));
        }
        return out;
    }

    TrigPoly resized(std::int64_t new_degree) const {
        TrigPoly out(new_degree);
        std::int64_t m = std::min(new_degree, degree_);
        for (std::int64_t n = -m; n <= m; ++n) out.set(n, (*this)[n]);
        return out;
    }
    TrigPoly trimmed() const { return resized(effective_degree()); }

    // Coefficients of the complex-conjugate function.
    TrigPoly conjugate() const {
        TrigPoly out(degree_);
        for (std::int64_t n = -degree_; n <= degree_; ++n) out.set(n, coeff_conj((*this)[-n]));
        return out;
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        if (o.degree_ > degree_) *this = resized(o.degree_);
        for (std::int64_t n = -o.degree_; n <= o.degree_; ++n) add(n, o[n]);
        return *this;
    }
    TrigPoly& operator-=(const TrigPoly& o) {
        if (o.degree_ > degree_) *this = resized(o.degree_);
        for (std::int64_t n = -o.degree_; n <= o.degree_; ++n) c_[static_cast<std::size_t>(n + degree_)] -= o[n];
        return *this;
    }
    TrigPoly& operator*=(const T& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(TrigPoly a, const T& s) { return a *= s; }
    friend TrigPoly operator*(const T& s, TrigPoly a) { return a *= s; }

private:
    std::int64_t degree_;
    std::vector<T> c_;
};

using Poly = TrigPoly<Complex>;
using QPoly = TrigPoly<QComplex>;

inline Poly cos_poly(std::int64_t n, double amp = 1.0) {
    Poly p(n);
    p.add(n, amp / 2);
    p.add(-n, amp / 2);
    return p;
}
inline Poly sin_poly(std::int64_t n, double amp = 1.0) {
    Poly p(n);
    p.add(n, Complex(0, -amp / 2));
    p.add(-n, Complex(0, amp / 2));
    return p;
}

template <class T>
TrigPoly<T> multiply(const TrigPoly<T>& f, const TrigPoly<T>& g) {
    const std::int64_t D = f.degree() + g.degree();
    check_coeff_budget(2 * D + 1, "multiply");
    const auto sf = f.support();
    const auto sg = g.support();
    TrigPoly<T> out(D);
    if constexpr (std::is_same_v<T, Complex>) {
        const double direct = static_cast<double>(sf.size()) * static_cast<double>(sg.size());
        const double L = static_cast<double>(next_pow2(2 * D + 1));
        if (direct > 6.0 * L * std::log2(std::max(L, 2.0)) + 4096.0) {
            auto conv = fft::convolve(f.dense(), g.dense());
            return TrigPoly<T>(D, std::move(conv));
        }
    }
    for (auto n : sf) {
        const T& a = f[n];
        for (auto m : sg) out.add(n + m, a * g[m]);
    }
    return out;
}

template <class T>
TrigPoly<T> dilate(const TrigPoly<T>& f, std::int64_t nu) {
    require(nu >= 1, "dilation factor must be >= 1");
    check_coeff_budget(2 * nu * f.degree() + 1, "dilate");
    TrigPoly<T> out(nu * f.degree());
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n)
        if (!coeff_is_zero(f[n])) out.set(nu * n, f[n]);
    return out;
}

inline Poly to_complex_poly(const QPoly& f) {
    Poly out(f.degree());
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) out.set(n, to_complex(f[n]));
    return out;
}

inline QPoly to_exact_poly(const Poly& f) {
    QPoly out(f.degree());
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) {
        Complex c = f[n];
        if (c != Complex{}) out.set(n, QComplex(rational_from_double(c.real()), rational_from_double(c.imag())));
    }
    return out;
}

// Pointwise evaluation; unit-phase recurrence resynchronized every 64 steps.
template <class T>
Complex eval(const TrigPoly<T>& f, double t) {
    const std::int64_t D = f.degree();
    Complex acc = as_complex(f[0]);
    const Complex z = std::polar(1.0, t);
    Complex zp(1.0, 0.0);
    for (std::int64_t n = 1; n <= D; ++n) {
        zp = (n % 64 == 0) ? std::polar(1.0, static_cast<double>(n) * t) : zp * z;
        const Complex a = as_complex(f[n]), b = as_complex(f[-n]);
        if (a != Complex{}) acc += a * zp;
        if (b != Complex{}) acc += b * std::conj(zp);
    }
    return acc;
}

template <class T>
TrigPoly<T> derivative(const TrigPoly<T>& f) {
    TrigPoly<T> out(f.degree());
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) {
        if (coeff_is_zero(f[n])) continue;
        if constexpr (std::is_same_v<T, QComplex>) {
            out.set(n, QComplex(Rational(0), Rational(n)) * f[n]);
        } else {
            out.set(n, Complex(0.0, static_cast<double>(n)) * f[n]);
        }
    }
    return out;
}

// Values at t_k = 2 pi k / M. Frequencies are folded mod M, so the values are exact for any M >= 1.
template <class T>
std::vector<Complex> eval_grid(const TrigPoly<T>& f, std::int64_t M) {
    require(M >= 1, "eval_grid needs M >= 1");
    check_grid_budget(M, "eval_grid");
    std::vector<Complex> b(static_cast<std::size_t>(M));
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) {
        const Complex c = as_complex(f[n]);
        if (c == Complex{}) continue;
        std::int64_t k = n % M;
        if (k < 0) k += M;
        b[static_cast<std::size_t>(k)] += c;
    }
    fft::transform(b, +1);
    return b;
}

// Recovers the coefficients of degree <= d from M >= 2d+1 equispaced samples.
inline Poly interpolate_grid(std::vector<Complex> values, std::int64_t d) {
    const auto M = static_cast<std::int64_t>(values.size());
    require(M >= 2 * d + 1, "interpolate_grid needs M >= 2d+1 samples");
    fft::transform(values, -1);
    Poly out(d);
    for (std::int64_t n = -d; n <= d; ++n) {
        std::int64_t k = ((n % M) + M) % M;
        out.set(n, values[static_cast<std::size_t>(k)] / static_cast<double>(M));
    }
    return out;
}

template <class T>
std::vector<double> eval_grid_real(const TrigPoly<T>& f, std::int64_t M) {
    auto v = eval_grid(f, M);
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
    return r;
}

// Scaled l^p sum of moduli: returns (scale, sum (|c|/scale)^p); p = inf gives (max, 1).
inline double lp_norm_of(const std::vector<double>& mods, double p) {
    double mx = 0.0;
    for (double m : mods) mx = std::max(mx, m);
    if (mx == 0.0) return 0.0;
    if (std::isinf(p)) return mx;
    double s = 0.0;
    for (double m : mods)
        if (m != 0.0) s += std::pow(m / mx, p);
    return mx * std::pow(s, 1.0 / p);
}

template <class T>
double lp_norm(const TrigPoly<T>& f, double p) {
    require(p >= 1.0, "l^p norm needs p >= 1");
    std::vector<double> mods;
    mods.reserve(f.size());
    for (const auto& c : f.dense()) mods.push_back(std::abs(as_complex(c)));
    return lp_norm_of(mods, p);
}

// Coefficient window on [-M, M], a per-coefficient window error bound, and a power-law tail
// |c_n| <= tail_const |n|^{-tail_exp} for |n| > M.
struct CoeffSeq {
    Poly window;
    double tail_const = 0.0;
    double tail_exp = 0.0;
    double window_err = 0.0;

    CoeffSeq() = default;
    explicit CoeffSeq(Poly w, double c = 0.0, double e = 0.0, double err = 0.0)
        : window(std::move(w)), tail_const(c), tail_exp(e), window_err(err) {
        require(tail_const >= 0.0 && tail_exp >= 0.0 && window_err >= 0.0, "CoeffSeq bounds must be nonnegative");
    }
    std::int64_t M() const { return window.degree(); }
    bool exact() const { return tail_const == 0.0 && window_err == 0.0; }
    Complex coeff(std::int64_t n) const { return window[n]; }

    // Largest possible modulus of a coefficient with |n| > M.
    double tail_max() const {
        return tail_const == 0.0 ? 0.0 : tail_const * std::pow(static_cast<double>(M() + 1), -tail_exp);
    }

    // Window cut to [-L, L]; dropped coefficients (with their error) are absorbed into the tail constant.
    CoeffSeq truncated(std::int64_t L, double exp = -1.0) const {
        if (L >= M()) return *this;
        require(L >= 0, "CoeffSeq::truncated: L >= 0");
        const double e = exp < 0.0 ? tail_exp : exp;
        require(tail_const == 0.0 || e <= tail_exp, "CoeffSeq::truncated: exponent above the existing tail");
        double C = tail_const * std::pow(static_cast<double>(M() + 1), e - tail_exp);
        for (std::int64_t n = L + 1; n <= M(); ++n) {
            const double m = std::max(std::abs(window[n]), std::abs(window[-n]));
            if (m == 0.0 && window_err == 0.0) continue;
            C = std::max(C, (m + window_err) * std::pow(static_cast<double>(n), e));
        }
        if (C > 0.0) require(e > 0.0, "CoeffSeq::truncated: dropped coefficients need a positive tail exponent");
        return CoeffSeq(window.resized(L), C, C > 0.0 ? e : tail_exp, window_err);
    }
};

// Upper bound on sum_{n > M} n^{-s}, valid for s > 1 and M >= 0.
inline double zeta_tail(double s, std::int64_t M) {
    const double m1 = static_cast<double>(M + 1);
    return std::pow(m1, -s) + std::pow(m1, 1.0 - s) / (s - 1.0);
}

// Upper bound on sum_{|n| > M} (C |n|^{-e})^p.
inline double tail_power_sum(double C, double e, std::int64_t M, double p) {
    if (C == 0.0) return 0.0;
    if (e * p <= 1.0) throw PreconditionError("divergent tail: tail_exp*p <= 1");
    return 2.0 * std::pow(C, p) * zeta_tail(e * p, M);
}

inline Interval a_p_norm(const CoeffSeq& x, double p) {
    require(p >= 1.0, "a_p_norm needs p >= 1");
    const double w = lp_norm(x.window, p);
    const double count = static_cast<double>(x.window.size());
    if (std::isinf(p)) {
        return {std::max(0.0, w - x.window_err), std::max(w + x.window_err, x.tail_max())};
    }
    if (x.tail_const > 0.0 && x.tail_exp * p <= 1.0) throw PreconditionError("divergent tail: tail_exp*p <= 1");
    const double err = x.window_err * std::pow(count, 1.0 / p);
    const double lo = x.window_err == 0.0 ? w : std::max(0.0, w - err);
    const double core = w + err;
    const double tail = tail_power_sum(x.tail_const, x.tail_exp, x.M(), p);
    const double hi = tail == 0.0 ? core : std::pow(std::pow(core, p) + tail, 1.0 / p);
    return {lo, hi};
}

template <class T>
Interval a_p_norm(const TrigPoly<T>& f, double p) {
    if constexpr (std::is_same_v<T, Complex>) {
        return a_p_norm(CoeffSeq(f), p);
    } else {
        return a_p_norm(CoeffSeq(to_complex_poly(f)), p);
    }
}

// Envelope sup_{|i| >= j} |c_i| (window part uses computed values plus window error).
inline double coeff_envelope(const CoeffSeq& x, std::int64_t j) {
    double env = x.tail_max();
    for (std::int64_t n = std::max<std::int64_t>(j, 0); n <= x.M(); ++n)
        env = std::max(env, std::max(std::abs(x.window[n]), std::abs(x.window[-n])) + x.window_err);
    return env;
}

// Product of two tail-bounded sequences: full convolution of the windows, a uniform window
// error, and a power-law tail beyond M_f + M_g assembled from the three contributions.
inline CoeffSeq product(const CoeffSeq& f, const CoeffSeq& g) {
    const std::int64_t Mf = f.M(), Mg = g.M(), M = Mf + Mg;
    Poly w = multiply(f.window, g.window);
    const double f1w = lp_norm(f.window, 1.0), g1w = lp_norm(g.window, 1.0);
    auto tail_l1 = [](const CoeffSeq& x) {
        return x.tail_const == 0.0 ? 0.0 : tail_power_sum(x.tail_const, x.tail_exp, x.M(), 1.0);
    };
    const double Ef1 = f.window_err * static_cast<double>(f.window.size()) + tail_l1(f);
    const double Eg1 = g.window_err * static_cast<double>(g.window.size()) + tail_l1(g);
    const double ef = std::max(f.window_err, f.tail_max());
    const double eg = std::max(g.window_err, g.tail_max());
    double eta = ef * g1w + eg * f1w + ef * Eg1;
    if (!f.window.is_zero() && !g.window.is_zero() && std::min(f.window.nnz(), g.window.nnz()) > 32) {
        eta += fft::convolution_error_bound(f1w, g1w, static_cast<std::size_t>(next_pow2(2 * M + 1)));
    }
    double C = 0.0, e = 0.0;
    if (f.tail_const > 0.0 || g.tail_const > 0.0) {
        const double f1 = f1w + Ef1, g1 = g1w + Eg1;
        e = std::numeric_limits<double>::infinity();
        if (f.tail_const > 0.0) e = std::min(e, f.tail_exp);
        if (g.tail_const > 0.0) e = std::min(e, g.tail_exp);
        const double n0 = static_cast<double>(M + 1);
        // Each contribution c * |n|^{-e_i} is rewritten as (c * n0^{e - e_i}) |n|^{-e} for |n| >= n0.
        auto add = [&](double c, double ei) {
            if (c > 0.0) C += c * std::pow(n0, e - ei);
        };
        // Split c_n = sum_k f_k g_{n-k} into |k| <= Mf (g in its tail), |k| >= |n|/2 with |k| > Mf,
        // and Mf < |k| < |n|/2 (g bounded by its envelope at |n|/2).
        // For |n| >= n0 every index in the middle range satisfies |n - k| >= |n|/2 >= n0/2.
        const double Hg = coeff_envelope(g, (M + 2) / 2);
        if (g.tail_const > 0.0) {
            const double rho = n0 / static_cast<double>(Mg + 1);
            add(f1 * g.tail_const * std::pow(rho, g.tail_exp), g.tail_exp);
        }
        if (f.tail_const > 0.0) {
            add(f.tail_const * std::pow(2.0, f.tail_exp) * g1, f.tail_exp);
            const double eg = g.tail_const > 0.0 ? g.tail_exp : e;
            double env = Hg * std::pow(2.0 * Mg + 2.0, eg);
            if (g.tail_const > 0.0) env = std::max(env, g.tail_const * std::pow(2.0, g.tail_exp));
            add(tail_l1(f) * env, eg);
        }
    }
    return CoeffSeq(std::move(w), C, e, eta);
}

// 1 - x as a CoeffSeq.
inline CoeffSeq one_minus(const CoeffSeq& x) {
    Poly w = x.window * Complex(-1.0);
    w.add(0, 1.0);
    return CoeffSeq(std::move(w), x.tail_const, x.tail_exp, x.window_err);
}

inline CoeffSeq difference(const CoeffSeq& a, const CoeffSeq& b) {
    Poly w = a.window - b.window;
    double C = 0.0, e = 0.0;
    const std::int64_t M = w.degree();
    if (a.tail_const > 0.0 || b.tail_const > 0.0) {
        e = std::numeric_limits<double>::infinity();
        if (a.tail_const > 0.0) e = std::min(e, a.tail_exp);
        if (b.tail_const > 0.0) e = std::min(e, b.tail_exp);
        const double n0 = static_cast<double>(M + 1);
        if (a.tail_const > 0.0) C += a.tail_const * std::pow(n0, e - a.tail_exp);
        if (b.tail_const > 0.0) C += b.tail_const * std::pow(n0, e - b.tail_exp);
    }
    // Part of the wider window that lies beyond the narrower sequence's window carries that tail.
    double err = a.window_err + b.window_err + std::max(a.M() < M ? a.tail_max() : 0.0, b.M() < M ? b.tail_max() : 0.0);
    return CoeffSeq(std::move(w), C, e, err);
}

}  // namespace wiener
