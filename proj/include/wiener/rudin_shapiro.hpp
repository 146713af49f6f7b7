#pragma once

#include <bit>
#include <string>
#include <vector>

#include "gridcert.hpp"

namespace wiener {

// (-1)^(number of adjacent "11" pairs in the binary expansion of n).
inline int rudin_shapiro_sign(std::uint64_t n) {
    return (std::popcount(n & (n >> 1)) & 1) ? -1 : 1;
}

enum class SignRule { binary_pairs, binary_pairs_shifted, exhaustive };

inline std::string to_string(SignRule r) {
    switch (r) {
        case SignRule::binary_pairs: return "rudin_shapiro(n)";
        case SignRule::binary_pairs_shifted: return "rudin_shapiro(n-1)";
        default: return "exhaustive_search";
    }
}

struct QCertificate {
    bool certified = false;
    double bound = std::numeric_limits<double>::infinity();  // certified upper bound on sup |Q_k|
    double target = 0.0;                                      // 2^{(k+1)/2}
    double grid_lower = 0.0;                                  // max over sampled points (a lower bound on sup)
    std::string method;
    SignRule rule = SignRule::binary_pairs;
    std::vector<std::string> attempts;
};

struct QResult {
    Poly Q;
    std::vector<int> signs;  // signs[n-1] = eps_n
    QCertificate cert;
};

struct RudinShapiroOptions {
    std::int64_t grid_degree_cap = std::int64_t{1} << 14;  // largest degree certified on a grid
    double rel_tol = 1e-9;
    bool skip_primary = false;  // for tests of the fallback chain
    bool force_exhaustive = false;
};

inline Poly cosine_series(const std::vector<int>& signs) {
    const auto N = static_cast<std::int64_t>(signs.size());
    Poly Q(N);
    for (std::int64_t n = 1; n <= N; ++n) {
        Q.set(n, 0.5 * signs[static_cast<std::size_t>(n - 1)]);
        Q.set(-n, 0.5 * signs[static_cast<std::size_t>(n - 1)]);
    }
    return Q;
}

namespace detail {

// Grid certificate with growing grid factor; returns (certified bound, grid max).
inline std::pair<double, double> grid_certify(const Poly& Q, double target, double rel_tol) {
    double best = std::numeric_limits<double>::infinity(), gmax = 0.0;
    for (int gf : {16, 64, 256, 1024}) {
        if (static_cast<double>(gf) * static_cast<double>(Q.degree() + 1) > static_cast<double>(budget().max_grid)) break;
        auto c = certified_sup(Q, gf);
        best = std::min(best, c.bound);
        gmax = std::max(gmax, c.grid_max);
        if (best <= target * (1 + rel_tol) || gmax > target * (1 + rel_tol)) break;
    }
    return {best, gmax};
}

// Golay pair recursion P_{m+1} = P_m | R_m, R_{m+1} = P_m | -R_m from P_0 = R_0 = 1.
inline std::vector<int> golay_first(int k) {
    std::vector<int> P{1}, R{1};
    for (int m = 0; m < k; ++m) {
        std::vector<int> P2(P), R2(P);
        P2.insert(P2.end(), R.begin(), R.end());
        for (int r : R) R2.push_back(-r);
        P.swap(P2);
        R.swap(R2);
    }
    return P;
}

}  // namespace detail

// Q_k(t) = sum_{n=1}^{2^k} eps_n cos nt with certified sup |Q_k| <= 2^{(k+1)/2}.
inline QResult build_Q(int k, const RudinShapiroOptions& opt = {}) {
    require(k >= 0 && k < 40, "build_Q: k must be in [0, 40)");
    const std::int64_t N = std::int64_t{1} << k;
    check_coeff_budget(2 * N + 1, "build_Q(k=" + std::to_string(k) + ")");
    const double target = std::pow(2.0, 0.5 * (k + 1));
    QResult res;
    res.cert.target = target;

    if (!opt.skip_primary && !opt.force_exhaustive) {
        std::vector<int> s(static_cast<std::size_t>(N));
        for (std::int64_t n = 1; n <= N; ++n) s[static_cast<std::size_t>(n - 1)] = rudin_shapiro_sign(static_cast<std::uint64_t>(n));
        if (N <= opt.grid_degree_cap) {
            Poly Q = cosine_series(s);
            auto [bound, gmax] = detail::grid_certify(Q, target, opt.rel_tol);
            if (bound <= target * (1 + opt.rel_tol)) {
                res.Q = std::move(Q);
                res.signs = std::move(s);
                res.cert = {true, bound, target, gmax, "grid", SignRule::binary_pairs, res.cert.attempts};
                res.cert.attempts.push_back("rudin_shapiro(n): certified bound " + std::to_string(bound));
                return res;
            }
            res.cert.attempts.push_back("rudin_shapiro(n): failed, certified bound " + std::to_string(bound) +
                                        ", sampled max " + std::to_string(gmax) + " vs " + std::to_string(target));
        } else {
            res.cert.attempts.push_back("rudin_shapiro(n): degree above grid cap, not certifiable");
        }
    }

    if (!opt.force_exhaustive) {
        // eps_n = a(n-1) is the first row of the Golay pair; |P|^2 + |R|^2 = 2^{k+1} on the circle and
        // Q_k = Re(e^{it} P_k(e^{it})), so sup |Q_k| <= 2^{(k+1)/2} follows once the recursion is checked.
        std::vector<int> s(static_cast<std::size_t>(N));
        for (std::int64_t n = 1; n <= N; ++n) s[static_cast<std::size_t>(n - 1)] = rudin_shapiro_sign(static_cast<std::uint64_t>(n - 1));
        const auto golay = detail::golay_first(k);
        if (golay == s) {
            res.Q = cosine_series(s);
            res.signs = std::move(s);
            res.cert.certified = true;
            res.cert.bound = target;
            res.cert.rule = SignRule::binary_pairs_shifted;
            res.cert.method = "golay_recursion";
            if (N <= opt.grid_degree_cap) {
                auto [bound, gmax] = detail::grid_certify(res.Q, target, opt.rel_tol);
                res.cert.grid_lower = gmax;
                if (gmax > target * (1 + opt.rel_tol))
                    throw CertificateError("sampled |Q_k| <= 2^{(k+1)/2}", gmax, target);
                (void)bound;
            }
            res.cert.attempts.push_back("rudin_shapiro(n-1): certified by complementary-pair recursion");
            return res;
        }
        res.cert.attempts.push_back("rudin_shapiro(n-1): recursion mismatch");
    }

    require(k <= 4, "build_Q: exhaustive sign search is limited to k <= 4");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
        std::vector<int> s(static_cast<std::size_t>(N));
        for (std::int64_t n = 0; n < N; ++n) s[static_cast<std::size_t>(n)] = ((mask >> n) & 1u) ? -1 : 1;
        Poly Q = cosine_series(s);
        auto [bound, gmax] = detail::grid_certify(Q, target, opt.rel_tol);
        if (bound <= target * (1 + opt.rel_tol)) {
            res.Q = std::move(Q);
            res.signs = std::move(s);
            res.cert.certified = true;
            res.cert.bound = bound;
            res.cert.grid_lower = gmax;
            res.cert.rule = SignRule::exhaustive;
            res.cert.method = "grid";
            res.cert.attempts.push_back("exhaustive: mask " + std::to_string(mask));
            return res;
        }
    }
    throw CertificateError("sup |Q_k| <= 2^{(k+1)/2} (no certified sign choice)", res.cert.bound, target);
}

// ||phi||_{A_q} for phi = 2^{-(k+1)/2} Q_k.
inline double phi_aq_closed_form(double q, int k) { return std::pow(2.0, (k + 1) * (1.0 / q - 0.5) - 1.0); }

// Least k >= 1 with ||phi||_{A_q} < gamma.
inline int phi_degree_index(double q, double gamma) {
    require(q > 2.0, "build_phi: q must exceed 2");
    require(gamma > 0.0, "build_phi: gamma must be positive");
    int k = 1;
    while (phi_aq_closed_form(q, k) >= gamma) {
        ++k;
        if (k > 62) throw ResourceError("build_phi: k exceeds 62", "max_coeffs");
    }
    return k;
}

struct PhiResult {
    Poly phi;
    int k = 0;
    double aq = 0.0;            // computed from coefficients
    double aq_closed = 0.0;     // closed form
    double l2 = 0.0;            // ||phi||_{L^2} by Parseval
    double sup_bound = 0.0;     // certified sup |phi|
    double a1 = 0.0;            // ||phi||_A
    QCertificate q_cert;
};

inline PhiResult build_phi(double q, double gamma, const RudinShapiroOptions& opt = {}) {
    const int k = phi_degree_index(q, gamma);
    const std::int64_t N = std::int64_t{1} << std::min(k, 62);
    if (k >= 62 || 2 * N + 1 > budget().max_coeffs)
        throw ResourceError("build_phi needs k=" + std::to_string(k) + " (2^k cosine terms), above the coefficient budget",
                            "max_coeffs");
    QResult Q = build_Q(k, opt);
    PhiResult r;
    r.k = k;
    const double scale = std::pow(2.0, -0.5 * (k + 1));
    r.phi = Q.Q * Complex(scale);
    r.aq = lp_norm(r.phi, q);
    r.aq_closed = phi_aq_closed_form(q, k);
    r.l2 = lp_norm(r.phi, 2.0);
    r.a1 = lp_norm(r.phi, 1.0);
    r.sup_bound = Q.cert.bound * scale;
    r.q_cert = std::move(Q.cert);
    if (r.sup_bound > 1.0 + opt.rel_tol) throw CertificateError("sup |phi| <= 1", r.sup_bound, 1.0);
    if (!(r.aq < gamma)) throw CertificateError("||phi||_{A_q} < gamma", r.aq, gamma);
    return r;
}

}  // namespace wiener
