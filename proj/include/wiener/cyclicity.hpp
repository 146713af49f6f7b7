#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "helson.hpp"

namespace wiener {

// ---------------------------------------------------------------------------------------------
// Multiplier deficit: inf over deg P <= d of ||1 - P f||_{A_p}.

struct DeficitResult {
    double value = 0.0;      // window value ||1 - P f_window||_p
    Interval interval;       // enclosure of ||1 - P f||_{A_p} for the returned P
    Poly multiplier;
    int iterations = 0;
    double optimality = 0.0;  // p = 2: relative normal-equation residual
    bool upper_bound = false;  // p < 2: value bounds the minimum from above
};

namespace detail {

// Convolution operator x -> x * F on a fixed FFT length, with its adjoint.
class MultiplierOperator {
public:
    MultiplierOperator(const Poly& F, std::int64_t d) : d_(d), Mf_(F.degree()) {
        out_len_ = static_cast<std::size_t>(2 * (d + Mf_) + 1);
        L_ = static_cast<std::size_t>(next_pow2(static_cast<std::int64_t>(out_len_)));
        check_grid_budget(static_cast<std::int64_t>(L_), "multiplier_deficit");
        Fh_.assign(L_, Complex{});
        for (std::int64_t n = -Mf_; n <= Mf_; ++n) Fh_[static_cast<std::size_t>(n + Mf_)] = F[n];
        fft::transform(Fh_, -1);
    }
    std::size_t out_len() const { return out_len_; }
    std::size_t dim() const { return static_cast<std::size_t>(2 * d_ + 1); }
    // index of frequency 0 in the output
    std::size_t zero() const { return static_cast<std::size_t>(d_ + Mf_); }

    std::vector<Complex> apply(const std::vector<Complex>& x) const {
        std::vector<Complex> b(L_, Complex{});
        std::copy(x.begin(), x.end(), b.begin());
        fft::transform(b, -1);
        for (std::size_t i = 0; i < L_; ++i) b[i] *= Fh_[i];
        fft::transform(b, +1);
        const double inv = 1.0 / static_cast<double>(L_);
        std::vector<Complex> out(out_len_);
        for (std::size_t i = 0; i < out_len_; ++i) out[i] = b[i] * inv;
        return out;
    }
    std::vector<Complex> adjoint(const std::vector<Complex>& r) const {
        std::vector<Complex> b(L_, Complex{});
        std::copy(r.begin(), r.end(), b.begin());
        fft::transform(b, -1);
        for (std::size_t i = 0; i < L_; ++i) b[i] *= std::conj(Fh_[i]);
        fft::transform(b, +1);
        const double inv = 1.0 / static_cast<double>(L_);
        std::vector<Complex> out(dim());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = b[i] * inv;
        return out;
    }
    // Toeplitz Gram matrix H_{jk} = sum_n conj(F_n) F_{n+j-k}.
    Eigen::MatrixXcd gram() const {
        std::vector<Complex> b(L_);
        for (std::size_t i = 0; i < L_; ++i) b[i] = std::norm(Fh_[i]);
        fft::transform(b, +1);
        const double inv = 1.0 / static_cast<double>(L_);
        const auto n = static_cast<Eigen::Index>(dim());
        Eigen::MatrixXcd H(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                const std::int64_t delta = j - k;
                const std::size_t idx = delta >= 0 ? static_cast<std::size_t>(delta) : L_ - static_cast<std::size_t>(-delta);
                H(j, k) = b[idx] * inv;
            }
        return H;
    }

private:
    std::int64_t d_, Mf_;
    std::size_t out_len_ = 0, L_ = 0;
    std::vector<Complex> Fh_;
};

inline std::vector<Complex> residual(const MultiplierOperator& A, const std::vector<Complex>& x) {
    auto r = A.apply(x);
    for (auto& v : r) v = -v;
    r[A.zero()] += 1.0;
    return r;
}

inline double lp_of(const std::vector<Complex>& r, double p) {
    std::vector<double> m(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) m[i] = std::abs(r[i]);
    return lp_norm_of(m, p);
}

inline double smoothed(const std::vector<Complex>& r, double p, double mu) {
    double s = 0.0;
    for (const auto& v : r) s += std::pow(std::norm(v) + mu * mu, 0.5 * p);
    return s;
}

}  // namespace detail

struct DeficitOptions {
    std::vector<double> mu_schedule{1e-2, 1e-4, 1e-8};
    int max_iter_per_stage = 3000;
    int stall_window = 50;
    double stall_tol = 1e-10;
    bool iterative = false;  // run the first-order solver also at p = 2
};

// Minimizes from the least-squares solution or from `start` (if better), never returning a
// multiplier worse than the starting one.
inline DeficitResult multiplier_deficit(const CoeffSeq& f, double p, std::int64_t d, const Poly* start = nullptr,
                                        const DeficitOptions& opt = {}) {
    require(p > 1.0 && p <= 2.0, "multiplier_deficit: p must lie in (1, 2]");
    require(d >= 0, "multiplier_deficit: d >= 0");
    require(!f.window.is_zero(), "multiplier_deficit: f must be nonzero");
    DeficitResult res;
    detail::MultiplierOperator A(f.window, d);
    const auto n = static_cast<Eigen::Index>(A.dim());
    Eigen::MatrixXcd H = A.gram();
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(H);
    require(ldlt.info() == Eigen::Success, "multiplier_deficit: singular Gram matrix");
    auto solveH = [&](const std::vector<Complex>& g) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = g[static_cast<std::size_t>(i)];
        Eigen::VectorXcd y = ldlt.solve(v);
        std::vector<Complex> out(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = y(i);
        return out;
    };
    // Least squares: H x = A^* e_0, (A^* e_0)_k = conj(F_{-k}).
    std::vector<Complex> rhs(static_cast<std::size_t>(n));
    for (std::int64_t k = -d; k <= d; ++k) rhs[static_cast<std::size_t>(k + d)] = std::conj(f.window[-k]);
    std::vector<Complex> x = solveH(rhs);
    {
        auto r = detail::residual(A, x);
        auto g = A.adjoint(r);
        double gn = 0.0, bn = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            gn += std::norm(g[i]);
            bn += std::norm(rhs[i]);
        }
        res.optimality = std::sqrt(gn / std::max(bn, 1e-300));
    }
    double best = detail::lp_of(detail::residual(A, x), p);
    if (start != nullptr) {
        std::vector<Complex> xs(static_cast<std::size_t>(n), Complex{});
        for (std::int64_t k = -std::min(d, start->degree()); k <= std::min(d, start->degree()); ++k)
            xs[static_cast<std::size_t>(k + d)] = (*start)[k];
        const double v = detail::lp_of(detail::residual(A, xs), p);
        if (v < best) {
            best = v;
            x = xs;
        }
    }
    std::vector<Complex> xbest = x;
    if (p < 2.0 || opt.iterative) {
        if (p == 2.0) {  // start away from the least-squares point
            std::fill(x.begin(), x.end(), Complex{});
            best = 1.0;
            xbest = x;
        }
        for (double mu : opt.mu_schedule) {
            double tau = 1.0;
            auto r = detail::residual(A, x);
            double Fs = detail::smoothed(r, p, mu);
            std::vector<double> hist{Fs};
            for (int it = 0; it < opt.max_iter_per_stage; ++it) {
                std::vector<Complex> wr(r.size());
                for (std::size_t i = 0; i < r.size(); ++i) wr[i] = 0.5 * p * std::pow(std::norm(r[i]) + mu * mu, 0.5 * p - 1.0) * r[i];
                auto g = A.adjoint(wr);  // descent direction for x is +H^{-1} A^* (w r)
                auto dir = solveH(g);
                double slope = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) slope += 2.0 * (std::conj(g[i]) * dir[i]).real();
                if (!(slope > 0.0)) break;
                bool ok = false;
                for (int ls = 0; ls < 60; ++ls) {
                    std::vector<Complex> xn(x.size());
                    for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + tau * dir[i];
                    auto rn = detail::residual(A, xn);
                    const double Fn = detail::smoothed(rn, p, mu);
                    if (Fn <= Fs - 1e-4 * tau * slope) {
                        x.swap(xn);
                        r.swap(rn);
                        Fs = Fn;
                        ok = true;
                        break;
                    }
                    tau *= 0.5;
                }
                ++res.iterations;
                if (!ok) break;
                const double v = detail::lp_of(r, p);
                if (v < best) {
                    best = v;
                    xbest = x;
                }
                tau = std::min(1.0, 2.0 * tau);
                hist.push_back(Fs);
                const auto h = hist.size();
                if (h > static_cast<std::size_t>(opt.stall_window)) {
                    const double old = hist[h - 1 - static_cast<std::size_t>(opt.stall_window)];
                    if ((old - Fs) <= opt.stall_tol * std::fabs(old)) break;
                }
            }
        }
    }
    res.value = best;
    res.upper_bound = p < 2.0;
    res.multiplier = Poly(d);
    for (std::int64_t k = -d; k <= d; ++k) res.multiplier.set(k, xbest[static_cast<std::size_t>(k + d)]);
    double delta = 0.0;
    if (!f.exact()) {
        const double tail = f.tail_const > 0.0 ? std::pow(tail_power_sum(f.tail_const, f.tail_exp, f.M(), p), 1.0 / p) : 0.0;
        const double werr = f.window_err * std::pow(static_cast<double>(f.window.size()), 1.0 / p);
        delta = lp_norm(res.multiplier, 1.0) * (tail + werr);
    }
    res.interval = {std::max(0.0, best - delta), best + delta};
    return res;
}

inline DeficitResult multiplier_deficit(const Poly& f, double p, std::int64_t d) { return multiplier_deficit(CoeffSeq(f), p, d); }

struct ProfileEntry {
    std::int64_t d = 0;
    DeficitResult deficit;
};

// Deficits along an increasing degree ladder; each run starts from the previous multiplier,
// so the values are nonincreasing.
inline std::vector<ProfileEntry> cyclicity_profile(const CoeffSeq& f, double p, std::vector<std::int64_t> ds,
                                                   const DeficitOptions& opt = {}) {
    require(!ds.empty(), "cyclicity_profile: empty degree list");
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    std::vector<ProfileEntry> out;
    for (auto d : ds) {
        const Poly* start = out.empty() ? nullptr : &out.back().deficit.multiplier;
        ProfileEntry e{d, multiplier_deficit(f, p, d, start, opt)};
        if (!out.empty() && e.deficit.value > out.back().deficit.value) e.deficit.value = out.back().deficit.value;
        out.push_back(std::move(e));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Obstruction: lower bound on ||1 - P f||_{A_p} over deg P <= d with max |P^(n)| <= B, from a
// distribution S in A_q with q = p/(p-1).

struct ObstructionResult {
    double bound = 0.0;
    Interval s0;                 // |S^(0)|
    Interval s_norm;             // ||S||_{A_q}
    double residual_numeric = 0.0;     // max_{|n| <= d} |<S, e^{int} f>| from the windows
    double residual_truncation = 0.0;  // rigorous bound on the window truncation
    double residual_used = 0.0;
    bool structural_zero = false;
    double B = 0.0;
    std::int64_t d = 0;
};

inline ObstructionResult obstruction_bound(const CoeffSeq& S, const CoeffSeq& f, double q, std::int64_t d, double B = 1e3,
                                           bool supports_disjoint = false) {
    require(q > 1.0 && d >= 0 && B >= 0.0, "obstruction_bound: need q > 1, d >= 0, B >= 0");
    ObstructionResult o;
    o.B = B;
    o.d = d;
    o.structural_zero = supports_disjoint;
    const std::int64_t Ms = S.M(), Mf = f.M();
    double mx = 0.0;
    for (std::int64_t n = -d; n <= d; ++n) {
        // <S, e^{int} f> = sum_m S^(m) f^(-m-n)
        Complex acc{};
        const std::int64_t lo = std::max(-Ms, -Mf - n), hi = std::min(Ms, Mf - n);
        for (std::int64_t m = lo; m <= hi; ++m) acc += S.window[m] * f.window[-m - n];
        mx = std::max(mx, std::abs(acc));
    }
    o.residual_numeric = mx;
    const double s1w = lp_norm(S.window, 1.0);
    double fsup = f.tail_max();
    for (const auto& c : f.window.dense()) fsup = std::max(fsup, std::abs(c) + f.window_err);
    double s_off = S.window_err * static_cast<double>(S.window.size());
    if (S.tail_const > 0.0)
        s_off = S.tail_exp > 1.0 ? s_off + tail_power_sum(S.tail_const, S.tail_exp, Ms, 1.0) : std::numeric_limits<double>::infinity();
    o.residual_truncation = s1w * std::max(f.window_err, f.tail_max()) + s_off * fsup;
    o.residual_used = supports_disjoint ? 0.0 : mx + o.residual_truncation;
    const double a0 = std::abs(S.window[0]);
    o.s0 = {std::max(0.0, a0 - S.window_err), a0 + S.window_err};
    o.s_norm = a_p_norm(S, q);
    require(o.s_norm.hi > 0.0, "obstruction_bound: S must be nonzero");
    o.bound = (o.s0.lo - static_cast<double>(2 * d + 1) * B * o.residual_used) / o.s_norm.hi;
    return o;
}

// ---------------------------------------------------------------------------------------------
// Smooth nonnegative function vanishing exactly on a closed set Z: a bump (1 - s^2)^r on every
// complementary gap, s the normalized position in the gap.

struct Witness {
    ArcSet Z;
    std::vector<Arc> gaps;
    int order = 3;
    CoeffSeq f;
    double min_gap = 0.0;
    double bump_integral = 0.0;  // int_{-1}^{1} (1 - s^2)^r ds
};

namespace detail {

// Coefficients of G(s) = (1 - s^2)^r in powers of s.
inline std::vector<double> bump_poly(int r) {
    std::vector<double> c(static_cast<std::size_t>(2 * r + 1), 0.0);
    double b = 1.0;
    for (int k = 0; k <= r; ++k) {
        c[static_cast<std::size_t>(2 * k)] = (k % 2 == 0 ? 1.0 : -1.0) * b;
        b = b * (r - k) / (k + 1);
    }
    return c;
}

inline double poly_derivative_at(const std::vector<double>& c, int k, double s) {
    double acc = 0.0;
    for (std::size_t n = static_cast<std::size_t>(k); n < c.size(); ++n) {
        double f = 1.0;
        for (int j = 0; j < k; ++j) f *= static_cast<double>(n) - j;
        acc += c[n] * f * std::pow(s, static_cast<double>(n) - k);
    }
    return acc;
}

}  // namespace detail

inline double witness_at(const Witness& w, double t) {
    t = wrap_2pi(t);
    for (const double x : {t, t + kTwoPi}) {
        auto it = std::upper_bound(w.gaps.begin(), w.gaps.end(), x, [](double y, const Arc& g) { return y < g.a; });
        if (it == w.gaps.begin()) continue;
        --it;
        if (x <= it->a || x >= it->b) continue;
        const double h = 0.5 * (it->b - it->a);
        const double s = (x - 0.5 * (it->a + it->b)) / h;
        return std::pow(std::max(0.0, 1.0 - s * s), w.order);
    }
    return 0.0;
}

// Gaps of K shorter than min_gap are absorbed into Z, so Z contains K.
inline Witness smooth_noncyclic_witness(const ArcSet& K, double eps_smooth, std::int64_t M, double min_gap = 1e-3) {
    require(!K.empty(), "smooth_noncyclic_witness: K must be nonempty");
    require(eps_smooth > 0.0 && M >= 1 && min_gap >= 0.0, "smooth_noncyclic_witness: need eps > 0, M >= 1");
    check_coeff_budget(2 * M + 1, "smooth_noncyclic_witness");
    Witness w;
    w.order = std::max(3, static_cast<int>(std::ceil(1.0 + eps_smooth + 1e-12)));
    w.min_gap = min_gap;
    // Canonical arcs keep a gap through 0 in one piece (then b > 2 pi).
    const ArcSet Kc = K.complement();
    for (const auto& g : Kc.arcs())
        if (g.b - g.a >= min_gap) w.gaps.push_back(g);
    // Z from the exact complement pieces; re-wrapping a joined arc would move its endpoints.
    const auto& pieces = Kc.pieces();
    const bool joined = Kc.arcs().size() < pieces.size();
    std::vector<Arc> kept;
    for (const auto& q : pieces) {
        double len = q.length();
        if (joined && (q.a == 0.0 || q.b >= kTwoPi)) len = Kc.arcs().back().b - Kc.arcs().back().a;
        if (len >= min_gap) kept.push_back(q);
    }
    w.Z = ArcSet::from_pieces(kept).complement();
    const int r = w.order;
    const auto G = detail::bump_poly(r);
    double integral = 0.0;
    for (std::size_t n = 0; n < G.size(); n += 2) integral += 2.0 * G[n] / static_cast<double>(n + 1);
    w.bump_integral = integral;
    // Endpoint transforms for the derivative orders r..2r; lower ones vanish at the endpoints.
    std::vector<EndpointTransform> T;
    std::vector<double> A;
    for (int k = r; k <= 2 * r; ++k) {
        std::vector<double> xs, ws;
        const double Gb = detail::poly_derivative_at(G, k, 1.0), Ga = detail::poly_derivative_at(G, k, -1.0);
        double asum = 0.0;
        for (const auto& g : w.gaps) {
            const double hk = std::pow(0.5 * (g.b - g.a), -k);
            xs.push_back(g.b);
            ws.push_back(hk * Gb);
            xs.push_back(g.a);
            ws.push_back(-hk * Ga);
            asum += hk * (std::fabs(Gb) + std::fabs(Ga));
        }
        T.push_back(endpoint_transform(xs, ws, M));
        A.push_back(asum);
    }
    Poly win(M);
    double hsum = 0.0;
    for (const auto& g : w.gaps) hsum += 0.5 * (g.b - g.a);
    win.set(0, hsum * integral / kTwoPi);
    double err = 0.0;
    for (int k = r; k <= 2 * r; ++k) err += T[static_cast<std::size_t>(k - r)].error_bound;
    for (std::int64_t n = 1; n <= M; ++n) {
        for (const std::int64_t m : {n, -n}) {
            const Complex mi(0.0, -static_cast<double>(m));  // -i m
            Complex acc{};
            Complex den = std::pow(mi, r + 1);
            for (int k = r; k <= 2 * r; ++k) {
                const double sg = (k % 2 == 0) ? 1.0 : -1.0;
                acc += sg * T[static_cast<std::size_t>(k - r)].values[static_cast<std::size_t>(m + M)] / den;
                den *= mi;
            }
            win.set(m, acc / kTwoPi);
        }
    }
    double C = 0.0;
    const double m1 = static_cast<double>(M + 1);
    for (int k = r; k <= 2 * r; ++k) C += A[static_cast<std::size_t>(k - r)] * std::pow(m1, r - k);
    w.f = CoeffSeq(std::move(win), C / kTwoPi, static_cast<double>(r + 1), err / kTwoPi);
    return w;
}

struct WitnessReport {
    Witness witness;
    double max_S_outside = 0.0;
    bool s0_zero = false;
    std::vector<ObstructionResult> ladder;
};

// Witness for K with the obstruction ladder from S; S_outside is max |S| on the complement of K
// (spatial), and the pairing vanishes identically when S_outside == 0 and K is inside Z.
inline WitnessReport smooth_noncyclic_witness(const ArcSet& K, const CoeffSeq& S, double S_outside, double p, double eps_smooth,
                                              const std::vector<std::int64_t>& ladder, std::int64_t M = 1 << 16,
                                              double min_gap = 1e-3, double B = 1e3) {
    require(p > 1.0 && p < 2.0 + 1e-12, "smooth_noncyclic_witness: p in (1, 2]");
    require(!K.complement().empty(), "smooth_noncyclic_witness: K must have nonempty complement");
    if (S_outside > 1e-6)
        throw PreconditionError("S is not supported in K: max outside = " + std::to_string(S_outside));
    WitnessReport r;
    r.max_S_outside = S_outside;
    r.witness = smooth_noncyclic_witness(K, eps_smooth, M, min_gap);
    const bool inside = K.intersect(r.witness.Z.complement()).measure() == 0.0;
    const double q = p / (p - 1.0);
    for (auto d : ladder) r.ladder.push_back(obstruction_bound(S, r.witness.f, q, d, B, inside && S_outside == 0.0));
    r.s0_zero = std::abs(S.window[0]) <= S.window_err;
    return r;
}

// ---------------------------------------------------------------------------------------------
// Two functions sharing the zero set of a Helson output: the witness f, certified noncyclic by
// S_J, and g = 1 - (extension of 1 from sample points of K), whose deficit profile is computed.

struct DemoConfig {
    double eps_smooth = 0.5;
    double min_gap = 1e-3;
    std::int64_t witness_M = 1 << 16;
    int sample_arcs = 4;
    std::int64_t ext_degree = 2048;
    double ext_eps = 0.1;
    std::vector<std::int64_t> ladder{0, 1, 2, 4, 8, 16, 32, 64};
    int zero_checks = 4096;
    double B = 1e3;
};

struct DemoResult {
    double p = 0.0, q = 0.0;
    Witness witness;
    ObstructionResult obstruction;
    bool K_in_Z = false;
    std::vector<double> samples;
    ExtensionResult extension;
    Poly g;
    std::vector<ProfileEntry> profile;
    double best_deficit = 0.0;
    std::int64_t best_d = 0;
    double max_f_on_K = 0.0;   // spatial, at sample points of K
    double max_g_on_samples = 0.0;
    MinAbsCertificate g_off_K;  // |g| > 0 on the complement of K
    bool g_zeros_in_K = false;
    double witness_tail_exp = 0.0;
};

inline DemoResult demo_corollary(const HelsonOutput& h, double q, const DemoConfig& cfg = {}) {
    require(!h.stages.empty(), "demo_corollary: empty Helson output");
    require(q > 2.0, "demo_corollary: q > 2");
    if (h.max_outside > 1e-6)
        throw PreconditionError("S_J is not supported in K: max |S_J| outside K = " + std::to_string(h.max_outside));
    DemoResult d;
    d.q = q;
    d.p = q / (q - 1.0);
    const ArcSet& K = h.K;
    d.witness = smooth_noncyclic_witness(K, cfg.eps_smooth, cfg.witness_M, cfg.min_gap);
    d.witness_tail_exp = d.witness.f.tail_exp;
    d.K_in_Z = K.intersect(d.witness.Z.complement()).measure() == 0.0;
    d.obstruction = obstruction_bound(h.stages.back().S, d.witness.f, q, cfg.ladder.back(), cfg.B, d.K_in_Z && h.max_outside == 0.0);
    for (int i = 0; i < cfg.zero_checks; ++i)
        d.max_f_on_K = std::max(d.max_f_on_K, witness_at(d.witness, K.point_at_fraction((i + 0.5) / cfg.zero_checks)));

    d.samples = arc_sample_points(K, cfg.sample_arcs);
    std::vector<Complex> ones(d.samples.size(), Complex(1.0, 0.0));
    d.extension = extension_probe(K, d.samples, ones, d.p, cfg.ext_eps, cfg.ext_degree);
    d.g = d.extension.f * Complex(-1.0);
    d.g.add(0, 1.0);
    d.g = d.g.real_part();
    for (double t : d.samples) d.max_g_on_samples = std::max(d.max_g_on_samples, std::abs(eval(d.g, t)));
    d.g_off_K = certified_min_abs_and_sign(d.g, K.complement());
    d.g_zeros_in_K = d.g_off_K.lower_bound > 0.0;
    d.profile = cyclicity_profile(CoeffSeq(d.g), d.p, cfg.ladder);
    d.best_deficit = std::numeric_limits<double>::infinity();
    for (const auto& e : d.profile)
        if (e.deficit.value < d.best_deficit) {
            d.best_deficit = e.deficit.value;
            d.best_d = e.d;
        }
    return d;
}

}  // namespace wiener
