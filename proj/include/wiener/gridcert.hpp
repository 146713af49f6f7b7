#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "trigpoly.hpp"

namespace wiener {

// Closed arc; stored unwrapped as a subinterval of [0, 2 pi].
struct Arc {
    double a = 0.0;
    double b = 0.0;
    double length() const { return b - a; }
};

// Finite union of disjoint closed arcs of the circle, kept as sorted disjoint pieces of [0, 2 pi].
class ArcSet {
public:
    ArcSet() = default;

    static ArcSet full() { return from_pieces({{0.0, kTwoPi}}); }

    // Accepts arbitrary arcs [a, b] with b >= a (b - a >= 2 pi gives the full circle).
    static ArcSet from_arcs(const std::vector<Arc>& arcs) {
        std::vector<Arc> pieces;
        for (const auto& arc : arcs) {
            require(arc.b >= arc.a, "arc endpoints must satisfy a <= b");
            if (arc.b - arc.a >= kTwoPi) return full();
            double a = wrap_2pi(arc.a);
            double b = a + (arc.b - arc.a);
            if (b <= kTwoPi) {
                pieces.push_back({a, b});
            } else {
                pieces.push_back({a, kTwoPi});
                pieces.push_back({0.0, b - kTwoPi});
            }
        }
        return from_pieces(std::move(pieces));
    }

    // Pieces must lie in [0, 2 pi]; they are sorted and merged when they touch or overlap.
    static ArcSet from_pieces(std::vector<Arc> pieces) {
        ArcSet s;
        std::sort(pieces.begin(), pieces.end(), [](const Arc& x, const Arc& y) { return x.a < y.a; });
        for (auto& p : pieces) {
            require(p.a >= 0.0 && p.b <= kTwoPi + 1e-15 && p.a <= p.b, "arc piece outside [0, 2pi]");
            p.b = std::min(p.b, kTwoPi);
            if (!s.p_.empty() && p.a <= s.p_.back().b) {
                s.p_.back().b = std::max(s.p_.back().b, p.b);
            } else {
                s.p_.push_back(p);
            }
        }
        return s;
    }

    const std::vector<Arc>& pieces() const { return p_; }
    bool empty() const { return p_.empty(); }

    bool is_full() const { return p_.size() == 1 && p_[0].a == 0.0 && p_[0].b >= kTwoPi; }

    // Canonical arcs: a piece starting at 0 joins a piece ending at 2 pi as one wraparound arc (last).
    std::vector<Arc> arcs() const {
        if (p_.size() >= 2 && p_.front().a == 0.0 && p_.back().b >= kTwoPi) {
            std::vector<Arc> out(p_.begin() + 1, p_.end());
            out.back().b = kTwoPi + p_.front().b;
            return out;
        }
        return p_;
    }

    double measure() const {
        double m = 0.0;
        for (const auto& p : p_) m += p.length();
        return m;
    }

    bool contains(double t) const {
        if (p_.empty()) return false;
        t = wrap_2pi(t);
        auto it = std::upper_bound(p_.begin(), p_.end(), t, [](double x, const Arc& a) { return x < a.a; });
        if (it != p_.begin() && t <= (it - 1)->b) return true;
        return t == 0.0 && p_.back().b >= kTwoPi;
    }

    // Circular distance from t to the set (0 inside).
    double distance(double t) const {
        if (p_.empty()) return std::numeric_limits<double>::infinity();
        t = wrap_2pi(t);
        double best = std::numeric_limits<double>::infinity();
        auto it = std::upper_bound(p_.begin(), p_.end(), t, [](double x, const Arc& a) { return x < a.a; });
        auto circ = [](double x, double y) {
            double d = std::fabs(x - y);
            return std::min(d, kTwoPi - d);
        };
        auto consider = [&](const Arc& a) {
            if (t >= a.a && t <= a.b) best = 0.0;
            best = std::min({best, circ(t, a.a), circ(t, a.b)});
        };
        if (it != p_.end()) consider(*it);
        if (it != p_.begin()) consider(*(it - 1));
        consider(p_.front());
        consider(p_.back());
        return best;
    }

    ArcSet complement() const {
        std::vector<Arc> out;
        double cur = 0.0;
        for (const auto& p : p_) {
            if (p.a > cur) out.push_back({cur, p.a});
            cur = std::max(cur, p.b);
        }
        if (cur < kTwoPi) out.push_back({cur, kTwoPi});
        return from_pieces(std::move(out));
    }

    ArcSet intersect(const ArcSet& o) const {
        std::vector<Arc> out;
        std::size_t i = 0, j = 0;
        while (i < p_.size() && j < o.p_.size()) {
            double a = std::max(p_[i].a, o.p_[j].a), b = std::min(p_[i].b, o.p_[j].b);
            if (a <= b) out.push_back({a, b});
            if (p_[i].b < o.p_[j].b) ++i; else ++j;
        }
        return from_pieces(std::move(out));
    }

    ArcSet unite(const ArcSet& o) const {
        std::vector<Arc> all = p_;
        all.insert(all.end(), o.p_.begin(), o.p_.end());
        return from_pieces(std::move(all));
    }

    // Minkowski enlargement by r >= 0.
    ArcSet dilate(double r) const {
        require(r >= 0.0, "dilation radius must be nonnegative");
        std::vector<Arc> arcs_in;
        for (const auto& p : p_) arcs_in.push_back({p.a - r, p.b + r});
        return from_arcs(arcs_in);
    }

    // Shrink by r: points whose r-neighbourhood lies inside the set.
    ArcSet erode(double r) const { return complement().dilate(r).complement(); }

    // Endpoints with orientation weight: -1 at a left end, +1 at a right end (full circle has none).
    void endpoints(std::vector<double>& xs, std::vector<double>& ws) const {
        for (const auto& a : arcs()) {
            if (a.b - a.a >= kTwoPi) continue;
            xs.push_back(a.a);
            ws.push_back(-1.0);
            xs.push_back(a.b);
            ws.push_back(1.0);
        }
    }

    // Deterministic uniform sample by arc length; u in [0, 1).
    double point_at_fraction(double u) const {
        require(!p_.empty(), "sampling from an empty arc set");
        double target = u * measure();
        for (const auto& p : p_) {
            if (target <= p.length()) return p.a + target;
            target -= p.length();
        }
        return p_.back().b;
    }

private:
    std::vector<Arc> p_;
};

// ---------------------------------------------------------------------------------------------
// Exact arc-restricted Fourier integrals.

// (1/2 pi) int_K e^{-ikt} dt.
inline Complex arc_exponential_integral(const ArcSet& K, std::int64_t k) {
    if (k == 0) return K.measure() / kTwoPi;
    Complex acc{};
    const double kd = static_cast<double>(k);
    for (const auto& p : K.pieces()) acc += std::polar(1.0, -kd * p.b) - std::polar(1.0, -kd * p.a);
    return acc * Complex(0.0, 1.0 / (kTwoPi * kd));
}

// (1/2 pi) int_K f(t) e^{-int} dt from the closed-form antiderivative of each exponential.
template <class T>
Complex arc_fourier_integral(const TrigPoly<T>& f, const ArcSet& K, std::int64_t n) {
    Complex acc{};
    for (std::int64_t m = -f.degree(); m <= f.degree(); ++m) {
        const Complex c = as_complex(f[m]);
        if (c == Complex{}) continue;
        acc += c * arc_exponential_integral(K, n - m);
    }
    return acc;
}

struct EndpointTransform {
    std::vector<Complex> values;  // index k + K for k in [-K, K]
    double error_bound = 0.0;     // absolute, per entry
    int taylor_terms = 0;         // 0 for direct summation
};

// D(k) = sum_x w_x e^{-ikx} for |k| <= K. Large problems use a Taylor expansion about the nearest
// point of a power-of-two grid, one FFT per Taylor term, with a rigorous truncation bound.
inline EndpointTransform endpoint_transform(const std::vector<double>& xs, const std::vector<double>& ws,
                                            std::int64_t K, double direct_limit = 2e7) {
    require(xs.size() == ws.size(), "endpoint_transform: size mismatch");
    EndpointTransform out;
    out.values.assign(static_cast<std::size_t>(2 * K + 1), Complex{});
    double wsum = 0.0;
    for (double w : ws) wsum += std::fabs(w);
    if (static_cast<double>(xs.size()) * static_cast<double>(2 * K + 1) <= direct_limit) {
        parallel_for(2 * K + 1, [&](std::int64_t idx) {
            const double k = static_cast<double>(idx - K);
            Complex acc{};
            for (std::size_t j = 0; j < xs.size(); ++j) acc += ws[j] * std::polar(1.0, -k * xs[j]);
            out.values[static_cast<std::size_t>(idx)] = acc;
        });
        out.error_bound = 4.0 * std::numeric_limits<double>::epsilon() * wsum * (1.0 + static_cast<double>(K) * kTwoPi);
        return out;
    }
    const std::int64_t L = next_pow2(2 * K + 1);
    check_grid_budget(L, "endpoint transform");
    const double step = kTwoPi / static_cast<double>(L);
    const double dmax = step / 2.0;
    const double z = static_cast<double>(K) * dmax;
    int P = 1;
    double term = z;  // z^P / P!
    while (wsum * term * std::exp(z) > 1e-17 * std::max(wsum, 1.0) && P < 60) {
        ++P;
        term *= z / P;
    }
    out.taylor_terms = P;
    std::vector<std::int64_t> idx(xs.size());
    std::vector<double> delta(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double x = wrap_2pi(xs[j]);
        auto g = static_cast<std::int64_t>(std::llround(x / step));
        delta[j] = (x - static_cast<double>(g) * step) / dmax;  // in [-1, 1]
        idx[j] = ((g % L) + L) % L;
    }
    std::vector<Complex> buf(static_cast<std::size_t>(L));
    std::vector<double> dpow(xs.size(), 1.0);
    std::vector<Complex> factor(static_cast<std::size_t>(2 * K + 1), Complex(1.0, 0.0));  // (-i k dmax)^p / p!
    for (int p = 0; p < P; ++p) {
        std::fill(buf.begin(), buf.end(), Complex{});
        for (std::size_t j = 0; j < xs.size(); ++j) {
            buf[static_cast<std::size_t>(idx[j])] += ws[j] * dpow[j];
            dpow[j] *= delta[j];
        }
        fft::transform(buf, -1);
        for (std::int64_t k = -K; k <= K; ++k) {
            const std::int64_t kk = ((k % L) + L) % L;
            auto& fk = factor[static_cast<std::size_t>(k + K)];
            out.values[static_cast<std::size_t>(k + K)] += fk * buf[static_cast<std::size_t>(kk)];
            fk *= Complex(0.0, -dmax * static_cast<double>(k)) / static_cast<double>(p + 1);
        }
    }
    const double lg = std::log2(static_cast<double>(L));
    out.error_bound = wsum * term * std::exp(z) + 8.0 * std::numeric_limits<double>::epsilon() * (lg + P) * wsum * std::exp(z);
    return out;
}

// Window of (1/2 pi) int_K e^{-ikt} dt for |k| <= K, with error bound.
inline EndpointTransform arc_exponential_window(const ArcSet& K, std::int64_t Kmax) {
    std::vector<double> xs, ws;
    K.endpoints(xs, ws);
    EndpointTransform D = endpoint_transform(xs, ws, Kmax);
    for (std::int64_t k = -Kmax; k <= Kmax; ++k) {
        auto& v = D.values[static_cast<std::size_t>(k + Kmax)];
        v = k == 0 ? Complex(K.measure() / kTwoPi, 0.0) : v * Complex(0.0, 1.0 / (kTwoPi * static_cast<double>(k)));
    }
    D.error_bound /= kTwoPi;
    return D;
}

// Coefficients (1/2 pi) int_K f(t) e^{-int} dt for |n| <= M, and a per-entry error bound.
inline std::pair<Poly, double> arc_fourier_window(const Poly& f, const ArcSet& K, std::int64_t M) {
    const std::int64_t D = f.degree();
    EndpointTransform E = arc_exponential_window(K, M + D);
    // conv over m of f_m * E(n - m); E index runs over [-(M+D), M+D].
    auto conv = fft::convolve(f.dense(), E.values);
    // conv index i corresponds to frequency i - D - (M + D).
    Poly out(M);
    for (std::int64_t n = -M; n <= M; ++n) out.set(n, conv[static_cast<std::size_t>(n + M + 2 * D)]);
    const double f1 = lp_norm(f, 1.0);
    const double err = f1 * E.error_bound +
                       fft::convolution_error_bound(f1, K.measure() / kTwoPi + E.error_bound,
                                                    static_cast<std::size_t>(next_pow2(static_cast<std::int64_t>(conv.size()))));
    return {std::move(out), err};
}

// ---------------------------------------------------------------------------------------------
// Certified bounds.

struct SupCertificate {
    double bound = 0.0;
    double grid_max = 0.0;
    std::int64_t grid = 0;
    double first_order = 0.0;
    double second_order = std::numeric_limits<double>::infinity();
    double hermite = std::numeric_limits<double>::infinity();
    std::string method;
};

namespace detail {

// Range of the cubic Hermite interpolant on the unit cell restricted to [s0, s1] in [0, 1].
inline std::pair<double, double> hermite_range(double v0, double v1, double d0, double d1, double s0 = 0.0,
                                               double s1 = 1.0) {
    // H(s) = v0 h00 + d0 h10 + v1 h01 + d1 h11 with derivatives already scaled by the cell width.
    auto H = [&](double s) {
        double s2 = s * s, s3 = s2 * s;
        return v0 * (2 * s3 - 3 * s2 + 1) + d0 * (s3 - 2 * s2 + s) + v1 * (-2 * s3 + 3 * s2) + d1 * (s3 - s2);
    };
    // H'(s) = A s^2 + B s + C.
    const double A = 6 * v0 + 3 * d0 - 6 * v1 + 3 * d1;
    const double B = -6 * v0 - 4 * d0 + 6 * v1 - 2 * d1;
    const double C = d0;
    double lo = std::min(H(s0), H(s1)), hi = std::max(H(s0), H(s1));
    auto consider = [&](double s) {
        if (s > s0 && s < s1) {
            double h = H(s);
            lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
    };
    if (std::fabs(A) > 1e-300) {
        double disc = B * B - 4 * A * C;
        if (disc >= 0) {
            double sq = std::sqrt(disc);
            double q = -0.5 * (B + (B >= 0 ? sq : -sq));
            consider(q / A);
            if (q != 0.0) consider(C / q);
        }
    } else if (std::fabs(B) > 1e-300) {
        consider(-C / B);
    }
    return {lo, hi};
}

inline std::int64_t cert_grid_size(std::int64_t deg, int grid_factor) {
    require(grid_factor >= 1, "grid_factor must be positive");
    return next_pow2(std::max<std::int64_t>(static_cast<std::int64_t>(grid_factor) * (deg + 1), 2 * deg + 1));
}

// Real f and f' sampled on the grid.
struct RealGrid {
    std::int64_t M = 0;
    double h = 0.0;
    std::vector<double> v, d;
};

inline RealGrid real_grid(const Poly& f, std::int64_t M) {
    RealGrid g;
    g.M = M;
    g.h = kTwoPi / static_cast<double>(M);
    g.v = eval_grid_real(f, M);
    g.d = eval_grid_real(derivative(f), M);
    return g;
}

}  // namespace detail

// Upper bound on sup |f|: the minimum of the first-order Bernstein certificate G / (1 - pi D / M),
// the second-order one at an interior extremum (real f) and a cubic Hermite cell bound (real f).
inline SupCertificate certified_sup(const Poly& f, int grid_factor = 8) {
    SupCertificate c;
    const std::int64_t D = f.effective_degree();
    const std::int64_t M = detail::cert_grid_size(D, grid_factor);
    c.grid = M;
    if (f.is_zero()) {
        c.method = "zero";
        return c;
    }
    const double ratio = kPi * static_cast<double>(D) / static_cast<double>(M);
    require(ratio < 1.0, "certified_sup: grid too coarse (pi*deg/M >= 1)");
    check_grid_budget(M, "certified_sup");
    const double l1 = lp_norm(f, 1.0);
    if (D == 0) {
        c.bound = c.grid_max = c.first_order = std::abs(f[0]);
        c.method = "constant";
        return c;
    }
    const bool real = f.is_real(1e-300);
    if (!real) {
        auto vals = eval_grid(f, M);
        for (const auto& v : vals) c.grid_max = std::max(c.grid_max, std::abs(v));
        c.first_order = c.grid_max / (1.0 - ratio);
        c.bound = std::min(c.first_order, l1);
        c.method = c.bound == l1 ? "l1" : "first_order";
        return c;
    }
    auto g = detail::real_grid(f, M);
    double hmax = 0.0;
    for (std::int64_t k = 0; k < M; ++k) {
        c.grid_max = std::max(c.grid_max, std::fabs(g.v[static_cast<std::size_t>(k)]));
        const auto k1 = static_cast<std::size_t>((k + 1) % M);
        auto [lo, hi] = detail::hermite_range(g.v[static_cast<std::size_t>(k)], g.v[k1], g.d[static_cast<std::size_t>(k)] * g.h,
                                              g.d[k1] * g.h);
        hmax = std::max({hmax, std::fabs(lo), std::fabs(hi)});
    }
    const double hd = g.h * static_cast<double>(D);
    c.first_order = c.grid_max / (1.0 - ratio);
    const double q2 = hd * hd / 8.0;
    if (q2 < 1.0) c.second_order = c.grid_max / (1.0 - q2);
    const double q4 = std::pow(hd, 4) / 384.0;
    if (q4 < 1.0) c.hermite = hmax / (1.0 - q4);
    c.bound = std::min({c.first_order, c.second_order, c.hermite, l1});
    c.method = c.bound == c.hermite ? "hermite" : c.bound == c.second_order ? "second_order" : c.bound == l1 ? "l1" : "first_order";
    // Guard against roundoff in the grid synthesis.
    c.bound *= 1.0 + 64.0 * std::numeric_limits<double>::epsilon() * std::log2(static_cast<double>(M));
    c.bound = std::max(c.bound, c.grid_max);
    return c;
}

enum class SignVerdict { positive, negative, mixed, unknown };

inline std::string to_string(SignVerdict s) {
    switch (s) {
        case SignVerdict::positive: return "positive";
        case SignVerdict::negative: return "negative";
        case SignVerdict::mixed: return "mixed";
        default: return "unknown";
    }
}

struct MinAbsCertificate {
    double lower_bound = 0.0;  // inf_K |f| >= lower_bound, cell by cell
    double inf_lower = 0.0;    // inf_K f >= inf_lower
    double sup_upper = 0.0;    // sup_K f <= sup_upper
    SignVerdict sign = SignVerdict::unknown;
    std::int64_t grid = 0;
    double slack = 0.0;
};

// Range of a real polynomial on K from Hermite cell bounds with the certified-sup error term.
inline MinAbsCertificate certified_min_abs_and_sign(const Poly& f, const ArcSet& K, int grid_factor = 8) {
    require(!K.empty(), "certified_min_abs_and_sign: empty K");
    require(f.is_real(1e-12 * std::max(1.0, lp_norm(f, 1.0))), "certified_min_abs_and_sign: f must be real");
    MinAbsCertificate c;
    const std::int64_t D = f.effective_degree();
    const std::int64_t M = detail::cert_grid_size(D, grid_factor);
    c.grid = M;
    check_grid_budget(M, "certified_min_abs_and_sign");
    const double S = certified_sup(f, grid_factor).bound;
    auto g = detail::real_grid(f, M);
    const double hd = g.h * static_cast<double>(D);
    c.slack = std::pow(hd, 4) / 384.0 * S + 64.0 * std::numeric_limits<double>::epsilon() * std::log2(static_cast<double>(M)) * S;
    double lo_all = std::numeric_limits<double>::infinity(), hi_all = -lo_all, abs_all = lo_all;
    bool saw_pos = false, saw_neg = false;
    for (const auto& piece : K.pieces()) {
        auto k0 = static_cast<std::int64_t>(std::floor(piece.a / g.h));
        auto k1 = static_cast<std::int64_t>(std::floor(piece.b / g.h));
        k0 = std::clamp<std::int64_t>(k0, 0, M - 1);
        k1 = std::clamp<std::int64_t>(k1, 0, M - 1);
        for (std::int64_t k = k0; k <= k1; ++k) {
            const double ta = static_cast<double>(k) * g.h;
            const double s0 = std::clamp((piece.a - ta) / g.h, 0.0, 1.0);
            const double s1 = std::clamp((piece.b - ta) / g.h, 0.0, 1.0);
            if (s1 < s0) continue;
            const auto i0 = static_cast<std::size_t>(k), i1 = static_cast<std::size_t>((k + 1) % M);
            auto [lo, hi] = detail::hermite_range(g.v[i0], g.v[i1], g.d[i0] * g.h, g.d[i1] * g.h, s0, s1);
            lo_all = std::min(lo_all, lo - c.slack);
            hi_all = std::max(hi_all, hi + c.slack);
            abs_all = std::min(abs_all, lo - c.slack > 0 ? lo - c.slack : hi + c.slack < 0 ? -(hi + c.slack) : 0.0);
            if (s0 == 0.0) {
                saw_pos |= g.v[i0] > 0;
                saw_neg |= g.v[i0] < 0;
            }
        }
        const double mid = eval(f, 0.5 * (piece.a + piece.b)).real();
        saw_pos |= mid > 0;
        saw_neg |= mid < 0;
    }
    c.inf_lower = lo_all;
    c.sup_upper = hi_all;
    c.lower_bound = abs_all;
    if (lo_all > 0) {
        c.sign = SignVerdict::positive;
    } else if (hi_all < 0) {
        c.sign = SignVerdict::negative;
    } else {
        c.sign = (saw_pos && saw_neg) ? SignVerdict::mixed : SignVerdict::unknown;
    }
    return c;
}

struct SuperlevelResult {
    ArcSet inner;
    ArcSet outer;
    std::int64_t crossings = 0;
    std::int64_t unresolved = 0;
    std::int64_t grid = 0;
};

// inner subset {f >= c} subset outer. Uncertain grid cells are refined with exact evaluations;
// a cell with a sign change and certified monotonicity holds exactly one crossing, isolated by
// safeguarded Newton/bisection to width tol.
namespace detail {

// (f(t), f'(t)) for real f in one pass over the nonnegative frequencies.
inline std::pair<double, double> eval_real_with_derivative(const Poly& f, double t) {
    double v = f[0].real(), d = 0.0;
    const Complex z = std::polar(1.0, t);
    Complex zn(1.0, 0.0);
    for (std::int64_t n = 1; n <= f.degree(); ++n) {
        zn = (n & 63) == 0 ? std::polar(1.0, static_cast<double>(n) * t) : zn * z;
        const Complex cz = f[n] * zn;
        v += 2.0 * cz.real();
        d -= 2.0 * static_cast<double>(n) * cz.imag();
    }
    return {v, d};
}

}  // namespace detail

inline SuperlevelResult superlevel_arcs(const Poly& f, double c, int grid_factor = 16, double tol = 1e-10) {
    require(f.is_real(1e-12 * std::max(1.0, lp_norm(f, 1.0))), "superlevel_arcs: f must be real");
    Poly g0 = f;
    g0.add(0, -c);
    {
        bool all_zero = true;
        const double scale = std::max(1.0, std::fabs(c));
        for (const auto& v : g0.dense()) all_zero &= std::abs(v) <= 1e-15 * scale;
        if (all_zero) throw PreconditionError("level set not transverse");
    }
    SuperlevelResult res;
    const std::int64_t D = g0.effective_degree();
    const double S = certified_sup(g0, 8).bound;
    if (D == 0) {
        res.grid = 1;
        if (g0[0].real() >= 0) res.inner = res.outer = ArcSet::full();
        return res;
    }
    const std::int64_t M = detail::cert_grid_size(D, grid_factor);
    res.grid = M;
    check_grid_budget(M, "superlevel_arcs");
    auto G = detail::real_grid(g0, M);
    const Poly dg = derivative(g0);
    const double Dd = static_cast<double>(D);
    const double round = 64.0 * std::numeric_limits<double>::epsilon() * std::log2(static_cast<double>(M)) * S;
    auto herm_err = [&](double width) { return std::pow(width * Dd, 4) / 384.0 * S + round; };
    const Poly gt = g0.trimmed();
    auto val = [&](double t) { return detail::eval_real_with_derivative(gt, t); };
    // Bernstein: |f''| <= D sup |f'|.
    const double S1 = certified_sup(dg, 8).bound;

    std::vector<Arc> in, out;
    auto add_in = [&](double a, double b) {
        if (b > a) in.push_back({a, b});
    };
    auto add_out = [&](double a, double b) {
        if (b > a) out.push_back({a, b});
    };

    // Resolves [l, r] given values/derivatives at both ends.
    std::function<void(double, double, double, double, double, double, int)> resolve =
        [&](double l, double r, double vl, double vr, double dl, double dr, int depth) {
            const double w = r - l;
            auto [lo, hi] = detail::hermite_range(vl, vr, dl * w, dr * w);
            const double e = herm_err(w);
            if (lo - e > 0) {
                add_in(l, r);
                add_out(l, r);
                return;
            }
            if (hi + e < 0) return;
            // Monotone on [l, r] if f' keeps its sign: |f'(t) - f'(endpoint)| <= D sup|f'| w / 2.
            const double dslack = Dd * S1 * w / 2.0 + round * Dd;
            const bool mono = (dl > dslack && dr > dslack) || (dl < -dslack && dr < -dslack);
            if (mono && vl >= 0 && vr >= 0) {
                add_in(l, r);
                add_out(l, r);
                return;
            }
            if (mono && vl < 0 && vr < 0) return;
            if (mono && ((vl >= 0) != (vr >= 0))) {
                ++res.crossings;
                double a = l, b = r, fa = vl;
                double x = l - vl / dl;
                for (int it = 0; it < 200 && b - a > tol; ++it) {
                    if (!(x > a && x < b)) x = 0.5 * (a + b);
                    auto [fx, dx] = val(x);
                    if ((fx >= 0) == (fa >= 0)) {
                        a = x;
                        fa = fx;
                    } else {
                        b = x;
                    }
                    double nx = x - fx / dx;
                    if (nx > a && nx < b && std::fabs(nx - x) < 0.25 * tol) {
                        // Newton has converged; close the bracket around nx.
                        const double pa = std::max(a, nx - 0.5 * tol), pb = std::min(b, nx + 0.5 * tol);
                        const double fpa = val(pa).first, fpb = val(pb).first;
                        if ((fpa >= 0) == (fa >= 0) && (fpb >= 0) != (fa >= 0)) {
                            a = pa;
                            b = pb;
                            break;
                        }
                    }
                    x = (nx > a && nx < b && std::fabs(nx - x) < 0.5 * (b - a)) ? nx : 0.5 * (a + b);
                }
                if (vl >= 0) {
                    add_in(l, a);
                    add_out(l, b);
                } else {
                    add_in(b, r);
                    add_out(a, r);
                }
                return;
            }
            if (w <= tol || depth > 60) {
                ++res.unresolved;
                add_out(l, r);
                return;
            }
            const double m = 0.5 * (l + r);
            auto [vm, dm] = val(m);
            resolve(l, m, vl, vm, dl, dm, depth + 1);
            resolve(m, r, vm, vr, dm, dr, depth + 1);
        };

    for (std::int64_t k = 0; k < M; ++k) {
        const auto i0 = static_cast<std::size_t>(k), i1 = static_cast<std::size_t>((k + 1) % M);
        const double l = static_cast<double>(k) * G.h;
        const double r = k + 1 == M ? kTwoPi : static_cast<double>(k + 1) * G.h;
        resolve(l, r, G.v[i0], G.v[i1], G.d[i0], G.d[i1], 0);
    }
    res.inner = ArcSet::from_pieces(std::move(in));
    res.outer = ArcSet::from_pieces(std::move(out));
    return res;
}

}  // namespace wiener
