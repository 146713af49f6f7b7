#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <map>
#include <string>
#include <vector>

#include "kahane.hpp"
#include "riesz.hpp"
#include "rudin_shapiro.hpp"

namespace wiener {

// ---------------------------------------------------------------------------------------------
// Constants.

inline double kahane_c4() { return std::log(8.0 * std::exp(1.0)) / std::log(1.5); }

struct TheoreticalConstants {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, gamma = 0.0;
};

// c5 is taken below c2/(2 c4) and gamma is then chosen with gamma^q/q = c5/2, so that both
// delta exp(gamma^q N/q) and sqrt(2) e^{-c2 N/2} delta^{-c4} decay in N.
inline TheoreticalConstants theoretical_constants(double q, double c1 = 2e-5) {
    TheoreticalConstants t;
    t.c1 = c1;
    t.c2 = concentration_c2(c1);
    require(t.c2 > 0.0, "theoretical constants need c2(c1) > 0");
    t.c3 = c1 / 2.0;
    t.c4 = kahane_c4();
    t.c5 = 0.9 * t.c2 / (2.0 * t.c4);
    t.gamma = std::pow(0.5 * q * t.c5, 1.0 / q);
    return t;
}

// Least N with both right-hand sides below eps/2.
inline double required_N(const TheoreticalConstants& t, double q, double eps) {
    const double r1 = t.c5 - std::pow(t.gamma, q) / q;
    const double r2 = 0.5 * t.c2 - t.c4 * t.c5;
    require(r1 > 0.0 && r2 > 0.0, "required_N: constants do not give decay");
    return std::max(std::ceil(std::log(2.0 / eps) / r1), std::ceil(std::log(2.0 * std::sqrt(2.0) / eps) / r2));
}

// ---------------------------------------------------------------------------------------------
// Sign approximation w.

// p_m(x) = int_0^x (1 - y^2)^m dy / int_0^1 (1 - y^2)^m dy: odd, increasing, p_m(1) = 1.
inline std::vector<double> sign_poly_coeffs(int m) {
    require(m >= 0 && m <= 24, "sign polynomial order must be in [0, 24]");
    std::vector<double> a(static_cast<std::size_t>(m + 1));
    double binom = 1.0, norm = 0.0;
    for (int k = 0; k <= m; ++k) {
        a[static_cast<std::size_t>(k)] = ((k & 1) ? -binom : binom) / (2.0 * k + 1.0);
        norm += a[static_cast<std::size_t>(k)];
        binom = binom * (m - k) / (k + 1.0);
    }
    for (auto& x : a) x /= norm;
    return a;
}

struct WResult {
    Poly w;
    int order = 0;
    double u_sup = 0.0;
    double sup_bound = 0.0;
    double l2sq = 0.0;
    double threshold = 0.0;
    bool meets_threshold = false;
    bool relaxed = false;
    std::int64_t sign_cells_failed = 0;
    bool sign_ok = false;
};

namespace detail {

inline Poly compose_odd(const Poly& v, const std::vector<double>& a) {
    Poly v2 = multiply(v, v);
    Poly acc = Poly::constant(a.back());
    for (std::size_t k = a.size() - 1; k-- > 0;) {
        acc = multiply(acc, v2);
        acc.add(0, a[k]);
    }
    return multiply(acc, v).real_part().trimmed();
}

// Every grid cell has either w u > 0 throughout or |w| < c3 throughout, using derivative slack.
inline std::int64_t sign_condition_failures(const Poly& w, const Poly& u, double c3) {
    Poly wu = multiply(w, u);
    const double Lwu = certified_sup(derivative(wu)).bound;
    const double Lw = certified_sup(derivative(w)).bound;
    // Cells short enough that the slack is a fraction of c3 and of c3^2 / sup|u|.
    const double usup = certified_sup(u).bound;
    const double need = 8.0 * kPi * std::max(Lw / c3, Lwu * usup / (c3 * c3));
    std::int64_t M = detail::cert_grid_size(std::max<std::int64_t>(wu.effective_degree(), 1), 8);
    M = std::max(M, next_pow2(static_cast<std::int64_t>(std::min(need, static_cast<double>(budget().max_grid)))));
    check_grid_budget(M, "build_w sign check");
    auto vwu = eval_grid_real(wu, M);
    auto vw = eval_grid_real(w, M);
    const double h = kTwoPi / static_cast<double>(M);
    std::int64_t bad = 0;
    for (std::int64_t k = 0; k < M; ++k) {
        const auto i = static_cast<std::size_t>(k), j = static_cast<std::size_t>((k + 1) % M);
        const bool pos = std::min(vwu[i], vwu[j]) - 0.5 * h * Lwu > 0.0;
        const bool small = std::max(std::fabs(vw[i]), std::fabs(vw[j])) + 0.5 * h * Lw < c3;
        if (!pos && !small) ++bad;
    }
    return bad;
}

}  // namespace detail

// w = p_m(u / U) with U a certified bound on sup |u|; order m < 0 picks the least m reaching the L^2 threshold.
inline WResult build_w(const Poly& u, int N, double c3, bool theoretical, int order = -1) {
    require(u.is_real(1e-12 * std::max(1.0, lp_norm(u, 1.0))), "build_w: u must be real");
    require(!u.is_zero(), "build_w: u must be nonzero");
    WResult r;
    r.threshold = theoretical ? std::pow(1.0 + std::exp(-static_cast<double>(N)), -1.0 / N) : 0.5;
    if (u.effective_degree() == 0) {
        r.w = Poly::constant(u[0].real() > 0 ? 1.0 : -1.0);
        r.u_sup = std::fabs(u[0].real());
        r.sup_bound = 1.0;
        r.l2sq = 1.0;
        r.meets_threshold = true;
        r.sign_ok = true;
        return r;
    }
    r.u_sup = certified_sup(u).bound;
    const Poly v = u * Complex(1.0 / r.u_sup);
    const int lo = order < 0 ? 0 : order, hi = order < 0 ? 24 : order;
    for (int m = lo; m <= hi; ++m) {
        r.w = detail::compose_odd(v, sign_poly_coeffs(m));
        r.order = m;
        r.l2sq = l2_norm_squared(r.w).real();
        r.meets_threshold = r.l2sq >= r.threshold - 1e-12;
        if (r.meets_threshold) break;
    }
    if (!r.meets_threshold) {
        if (theoretical)
            throw ResourceError("build_w: L^2 threshold " + std::to_string(r.threshold) + " not reached with order <= 24",
                                "max_coeffs");
        r.relaxed = true;
    }
    r.sup_bound = certified_sup(r.w, 512).bound;
    if (r.sup_bound > 1.0 + 1e-9) throw CertificateError("sup |w| <= 1", r.sup_bound, 1.0);
    r.sign_cells_failed = detail::sign_condition_failures(r.w, u, c3);
    r.sign_ok = r.sign_cells_failed == 0;
    return r;
}

// P = (1/(c3 N)) sum_{j=1}^N phi(nu^j t).
inline Poly build_P(const Poly& phi, std::int64_t nu, int N, double c3) {
    require(N >= 1 && c3 > 0.0, "build_P: need N >= 1 and c3 > 0");
    Poly P(0);
    std::int64_t f = 1;
    for (int j = 1; j <= N; ++j) {
        f *= nu;
        P += dilate(phi, f);
    }
    return P * Complex(1.0 / (c3 * N));
}

// Exact ||P||_A and ||phi||_A / c3 in rational arithmetic (with c3 taken as its exact double value).
inline std::pair<Rational, Rational> exact_a_norms(const Poly& phi, std::int64_t nu, int N, double c3) {
    QPoly qphi = to_exact_poly(phi);
    const Rational scale = Rational(1) / (rational_from_double(c3) * N);
    Rational pa(0), phia(0);
    for (auto n : qphi.support()) {
        require(qphi[n].im == 0, "exact_a_norms: phi must have real coefficients");
        phia += rational_abs(qphi[n].re);
    }
    // Accumulate coefficients of P by frequency so that overlapping spectra would be detected.
    std::map<std::int64_t, Rational> coeffs;
    std::int64_t f = 1;
    for (int j = 1; j <= N; ++j) {
        f *= nu;
        for (auto n : qphi.support()) coeffs[n * f] += qphi[n].re * scale;
    }
    for (const auto& [n, c] : coeffs) pa += rational_abs(c);
    return {pa, phia / rational_from_double(c3)};
}

// ---------------------------------------------------------------------------------------------
// Mollifier: centered B-spline density of order r, support [-R, R], box width a = 2R/r.

struct Mollifier {
    int r = 3;
    double R = 0.0;
    double a() const { return 2.0 * R / r; }

    // Fourier coefficient of 2 pi B, so that (h * chi)^(n) = h^(n) chi^(n) with chi^(0) = 1.
    double hat(std::int64_t n) const {
        if (n == 0) return 1.0;
        const double x = 0.5 * static_cast<double>(n) * a();
        return std::pow(std::sin(x) / x, r);
    }
    // |chi^(n)| <= (2 / (a |n|))^r.
    double tail_const() const { return std::pow(2.0 / a(), r); }

    double density(double x) const {
        const double y = x / a() + 0.5 * r;
        if (y <= 0.0 || y >= r) return 0.0;
        double s = 0.0, binom = 1.0, fact = 1.0;
        for (int k = 1; k < r; ++k) fact *= k;
        for (int k = 0; k <= r; ++k) {
            if (y > k) s += ((k & 1) ? -binom : binom) * std::pow(y - k, r - 1);
            binom = binom * (r - k) / (k + 1.0);
        }
        return s / (fact * a());
    }
};

// ---------------------------------------------------------------------------------------------
// Pipeline.

struct PrincipalConfig {
    double q = 4.0;
    double eps = 0.5;
    Poly u = cos_poly(1, 1.0);
    int N = 4;
    double c1 = 0.05;
    double c4 = kahane_c4();
    double c5 = 0.1;
    double gamma = 0.5;
    bool theoretical = false;
    int mollifier_order = 3;
    double mollifier_fraction = 0.5;   // R = fraction * margin
    std::int64_t nu = 0;               // 0: choose_nu(...) + nu_offset
    std::int64_t nu_offset = 0;
    std::int64_t window = std::int64_t{1} << 20;
    int w_order = -1;
    int grid_factor = 16;

    double c3() const { return c1 / 2.0; }

    void validate() const {
        require(q > 2.0, "principal: q must exceed 2");
        require(eps > 0.0, "principal: eps must be positive");
        require(N >= 1, "principal: N >= 1");
        require(c1 > 0.0 && c5 > 0.0 && gamma > 0.0 && c4 > 0.0, "principal: constants must be positive");
        require(mollifier_order >= 2, "principal: mollifier order >= 2");
        require(mollifier_fraction > 0.0 && mollifier_fraction < 1.0, "principal: mollifier fraction in (0, 1)");
        require(window >= 1, "principal: window >= 1");
        if (theoretical) require(concentration_c2(c1) > 0.0, "principal: theoretical mode needs c2(c1) > 0");
    }
};

struct PrincipalCertificates {
    Interval a_q_defect;            // ||1 - f||_{A_q}
    double lambda_defect = 0.0;     // ||1 - lambda||_{A_q}
    double lambda_defect_bound = 0.0;  // delta exp(gamma^q N / q)
    bool lambda_defect_holds = false;
    double l2_outside_E = 0.0;      // ||lambda||_{L^2(T \ E)} = ||lambda - h||_{L^2}
    double l2_outside_bound = 0.0;  // sqrt(2) e^{-c2 N / 2} delta^{-c4}
    double h_defect_upper = 0.0;    // ||1 - lambda||_{A_q} + ||lambda - h||_{L^2}
    double min_abs_P = 0.0;         // certified inf_K |P|
    double min_abs_P_direct = 0.0;
    double min_abs_P_chain = 0.0;   // inf_K X / c3
    SignVerdict sign_Pu = SignVerdict::unknown;
    SignVerdict sign_X_minus_c3 = SignVerdict::unknown;
    double a_norm_P = 0.0;
    double Cq = 0.0;
    bool a_norm_exact = false;
    std::string a_norm_P_exact;
    std::vector<double> expectations;  // s_j ||phi||^2 ||w||^2 per atom
    bool expectations_above = false;   // all > 1/100
    double f_outside_max = 0.0;        // spatial evaluation on a complement grid
    double f_outside_partial_max = 0.0;  // Fourier partial sum on the complement grid
    double f_outside_partial_bound = 0.0;  // tail plus window error
    double achieved_eps = 0.0;
    bool all_pass = false;
};

struct PrincipalOutput {
    PrincipalConfig config;
    PhiResult phi;
    WResult w;
    std::int64_t nu = 0;
    double delta = 0.0;
    KahaneResult rho;
    Poly lambda;
    Poly X;
    Poly P;
    ArcSet E;
    ArcSet E3;
    double margin = 0.0;
    Mollifier chi;
    ArcSet K;
    CoeffSeq f;
    double h_window_err = 0.0;
    PrincipalCertificates cert;
};

// f(t) = int_E lambda(tau) B(t - tau) d tau by Gauss-Legendre on the spline pieces.
inline double principal_f_at(const PrincipalOutput& out, double t) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double R = out.chi.R, a = out.chi.a();
    double acc = 0.0;
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
        const double lo = t + shift - R, hi = t + shift + R;
        for (const auto& pc : out.E.pieces()) {
            const double x0 = std::max(lo, pc.a), x1 = std::min(hi, pc.b);
            if (x1 <= x0) continue;
            for (int i = 0; i < out.chi.r; ++i) {
                const double s0 = std::max(x0, lo + i * a), s1 = std::min(x1, lo + (i + 1) * a);
                if (s1 <= s0) continue;
                acc += GL::integrate(
                    [&](double tau) { return eval(out.lambda, tau).real() * out.chi.density(t + shift - tau); }, s0, s1);
            }
        }
    }
    return acc;
}

inline PrincipalOutput run_principal(const PrincipalConfig& cfg_in) {
    PrincipalConfig cfg = cfg_in;
    cfg.validate();
    if (cfg.theoretical) {
        auto t = theoretical_constants(cfg.q, cfg.c1);
        cfg.c4 = t.c4;
        cfg.c5 = t.c5;
        cfg.gamma = t.gamma;
        const double Nreq = required_N(t, cfg.q, cfg.eps);
        if (cfg.N < Nreq) {
            const double log10deg = Nreq * std::log10(2.0 * Nreq + 1.0);
            throw ResourceError("principal theoretical mode needs N=" + std::to_string(static_cast<long long>(Nreq)) +
                                    " (c5=" + std::to_string(t.c5) + ", deg lambda ~ nu^N ~ 10^" +
                                    std::to_string(static_cast<long long>(log10deg)) + ")",
                                "max_coeffs");
        }
    }
    PrincipalOutput out;
    out.config = cfg;
    const double c3 = cfg.c3();
    const int N = cfg.N;

    out.phi = build_phi(cfg.q, cfg.gamma);
    out.w = build_w(cfg.u, N, c3, cfg.theoretical, cfg.w_order);
    out.nu = cfg.nu > 0 ? cfg.nu : choose_nu(out.phi.phi.effective_degree(), out.w.w.effective_degree(), N) + cfg.nu_offset;
    out.delta = std::exp(-cfg.c5 * N);
    out.rho = build_rho(Rational(1, 4), Rational(1, 3), out.delta);

    DRieszSpec spec{out.phi.phi, out.w.w, N, out.nu};
    spec.validate();
    const std::int64_t Dlam = spec.lambda_degree();
    check_coeff_budget(2 * Dlam + 1, "principal lambda");
    out.lambda = Poly(Dlam);
    for (std::size_t j = 0; j < out.rho.rho.size(); ++j) {
        Poly lj = riesz_lambda(spec, Complex(to_double(out.rho.rho.positions[j])));
        out.lambda += lj * Complex(to_double(out.rho.rho.masses[j]));
    }

    out.P = build_P(out.phi.phi, out.nu, N, c3);
    out.X = multiply(out.P, out.w.w) * Complex(c3);

    auto S1 = superlevel_arcs(out.X, cfg.c1, cfg.grid_factor, 1e-13);
    auto S3 = superlevel_arcs(out.X, c3, cfg.grid_factor, 1e-13);
    out.E = S1.inner;
    out.E3 = S3.inner;
    if (out.E.empty()) throw CertificateError("E = {X >= c1} nonempty", 0.0, 1.0);
    if (out.E.intersect(out.E3).measure() < out.E.measure() - 1e-12)
        throw CertificateError("{X >= c1} inside {X > c3}", out.E.intersect(out.E3).measure(), out.E.measure());
    const ArcSet below3 = out.E3.complement();
    out.margin = std::numeric_limits<double>::infinity();
    for (const auto& pc : out.E.pieces()) {
        if (pc.a > 0.0) out.margin = std::min(out.margin, below3.distance(pc.a));
        if (pc.b < kTwoPi) out.margin = std::min(out.margin, below3.distance(pc.b));
    }
    if (!(out.margin > 0.0)) throw CertificateError("margin between {X >= c1} and {X <= c3} positive", out.margin, 0.0);
    out.chi.r = cfg.mollifier_order;
    out.chi.R = cfg.mollifier_fraction * std::min(out.margin, 1.0);
    out.K = out.E.dilate(out.chi.R);

    // f = (lambda 1_E) * chi.
    const std::int64_t M = cfg.window;
    require(M > Dlam, "principal: window must exceed deg lambda");
    auto [hwin, herr] = arc_fourier_window(out.lambda, out.E, M);
    out.h_window_err = herr;
    for (std::int64_t n = -M; n <= M; ++n) hwin.set(n, hwin[n] * out.chi.hat(n));
    const double lamA = lp_norm(out.lambda, 1.0);
    const double arcs = static_cast<double>(out.E.arcs().size());
    const double hC = lamA * arcs / (kPi * (1.0 - static_cast<double>(Dlam) / static_cast<double>(M + 1)));
    out.f = CoeffSeq(std::move(hwin), hC * out.chi.tail_const(), out.chi.r + 1.0, herr);

    // Certificates.
    auto& c = out.cert;
    c.a_q_defect = a_p_norm(one_minus(out.f), cfg.q);
    c.achieved_eps = c.a_q_defect.hi;
    {
        Poly d = out.lambda * Complex(-1.0);
        d.add(0, 1.0);
        c.lambda_defect = lp_norm(d, cfg.q);
    }
    c.lambda_defect_bound = out.delta * std::exp(std::pow(cfg.gamma, cfg.q) * N / cfg.q);
    c.lambda_defect_holds = c.lambda_defect <= c.lambda_defect_bound;
    {
        Poly lam2 = multiply(out.lambda, out.lambda);
        const ArcSet outside = out.E.complement();
        double v = 0.0;
        if (!outside.empty()) {
            auto [w0, e0] = arc_fourier_window(lam2, outside, 0);
            v = std::max(0.0, w0[0].real() + e0);
        }
        c.l2_outside_E = std::sqrt(v);
    }
    const double c2 = concentration_c2(cfg.c1);
    c.l2_outside_bound = std::sqrt(2.0) * std::exp(-0.5 * c2 * N) * std::pow(out.delta, -cfg.c4);
    c.h_defect_upper = c.lambda_defect + c.l2_outside_E;

    auto cP = certified_min_abs_and_sign(out.P, out.K, 8);
    c.min_abs_P_direct = cP.lower_bound;
    Poly Xm = out.X;
    Xm.add(0, -c3);
    auto cX = certified_min_abs_and_sign(Xm, out.K, 8);
    c.sign_X_minus_c3 = cX.sign;
    c.min_abs_P_chain = cX.sign == SignVerdict::positive ? 1.0 + cX.inf_lower / c3 : 0.0;
    c.min_abs_P = std::max(c.min_abs_P_direct, c.min_abs_P_chain);
    c.sign_Pu = certified_min_abs_and_sign(multiply(out.P, cfg.u), out.K, 8).sign;

    c.a_norm_P = lp_norm(out.P, 1.0);
    c.Cq = out.phi.a1 / c3;
    auto [pa, bound] = exact_a_norms(out.phi.phi, out.nu, N, c3);
    c.a_norm_exact = pa == bound;
    c.a_norm_P_exact = rational_to_string(pa);

    c.expectations_above = true;
    for (const auto& s : out.rho.rho.positions) {
        const double e = to_double(s) * out.phi.l2 * out.phi.l2 * out.w.l2sq;
        c.expectations.push_back(e);
        c.expectations_above = c.expectations_above && e > 0.01;
    }

    // f on the complement of K: spatial values and Fourier partial sums.
    {
        const ArcSet outside = out.K.complement();
        const std::int64_t G = std::min<std::int64_t>(next_pow2(2 * M + 1), budget().max_grid);
        auto vals = eval_grid(out.f.window, G);
        double pm = 0.0;
        std::vector<double> pts;
        for (std::int64_t k = 0; k < G; ++k) {
            const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(G);
            if (!outside.contains(t)) continue;
            pm = std::max(pm, std::abs(vals[static_cast<std::size_t>(k)]));
            if (k % 4096 == 0) pts.push_back(t);
        }
        c.f_outside_partial_max = pm;
        c.f_outside_partial_bound = tail_power_sum(out.f.tail_const, out.f.tail_exp, M, 1.0) +
                                    out.f.window_err * static_cast<double>(2 * M + 1);
        double sm = 0.0;
        for (double t : pts) sm = std::max(sm, std::fabs(principal_f_at(out, t)));
        c.f_outside_max = sm;
    }

    c.all_pass = c.min_abs_P > 1.0 && c.sign_Pu == SignVerdict::positive && c.a_norm_exact &&
                 c.sign_X_minus_c3 == SignVerdict::positive && c.f_outside_max < 1e-9;
    if (!(c.min_abs_P > 1.0)) throw CertificateError("inf_K |P| > 1", c.min_abs_P, 1.0);
    if (c.sign_Pu != SignVerdict::positive)
        throw CertificateError("P u > 0 on K (verdict " + to_string(c.sign_Pu) + ")", 0.0, 0.0);
    if (!c.a_norm_exact) throw CertificateError("||P||_A = ||phi||_A / c3", to_double(pa), to_double(bound));
    if (cfg.theoretical && !(c.achieved_eps < cfg.eps)) throw CertificateError("||1 - f||_{A_q} < eps", c.achieved_eps, cfg.eps);
    return out;
}

}  // namespace wiener
