#pragma once

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <vector>

#include "principal.hpp"

namespace wiener {

// ---------------------------------------------------------------------------------------------
// Enumeration of real trigonometric polynomials with dyadic coefficients.
//
// Level L uses the value set V_L = { m / 2^e : 0 <= e < L, |m / 2^e| <= L }, ordered by exponent e,
// then |v|, then + before -, with 0 first. Within level L, degrees run 1, ..., L and then 0; for
// each degree the denominator exponent (largest over the coefficients) runs 0, ..., L-1; tuples
// (a_0, b_1, a_1, ..., b_d, a_d) are lexicographic in the V_L order. Elements already produced by
// an earlier level are skipped, so the map j -> u_j is injective and reaches every polynomial
// with dyadic coefficients.

struct DyadicValue {
    std::int64_t num = 0;
    int exp = 0;  // value = num / 2^exp, num odd unless exp == 0
    double value() const { return std::ldexp(static_cast<double>(num), -exp); }
};

namespace detail {

inline std::vector<DyadicValue> dyadic_values(int L) {
    std::vector<DyadicValue> v{{0, 0}};
    for (int e = 0; e < L; ++e) {
        const std::int64_t maxnum = static_cast<std::int64_t>(L) << e;
        for (std::int64_t m = 1; m <= maxnum; ++m) {
            if (e > 0 && m % 2 == 0) continue;
            v.push_back({m, e});
            v.push_back({-m, e});
        }
    }
    return v;
}

inline bool in_level(const DyadicValue& x, int L) {
    return x.exp < L && std::llabs(x.num) <= (static_cast<std::int64_t>(L) << x.exp);
}

}  // namespace detail

class DenseSequence {
public:
    // Returns u_j for j = 1, 2, ... in order.
    Poly next() {
        while (true) {
            if (!started_) start_block();
            if (advance_to_valid()) {
                Poly p = current();
                step();
                return p;
            }
            next_block();
        }
    }

private:
    int L_ = 1;
    int deg_index_ = 0;  // position in degree order 1..L, 0
    int e_ = 0;
    bool started_ = false;
    bool exhausted_ = false;
    std::vector<DyadicValue> vals_;
    std::vector<std::size_t> idx_;

    int degree() const { return deg_index_ < L_ ? deg_index_ + 1 : 0; }

    void start_block() {
        vals_ = detail::dyadic_values(L_);
        idx_.assign(static_cast<std::size_t>(2 * degree() + 1), 0);
        exhausted_ = false;
        started_ = true;
    }
    void next_block() {
        ++e_;
        if (e_ >= L_) {
            e_ = 0;
            ++deg_index_;
            if (deg_index_ > L_) {
                deg_index_ = 0;
                ++L_;
            }
        }
        started_ = false;
    }
    // Odometer, last coordinate fastest.
    void step() {
        for (std::size_t k = idx_.size(); k-- > 0;) {
            if (++idx_[k] < vals_.size()) return;
            idx_[k] = 0;
        }
        exhausted_ = true;
    }
    bool valid() const {
        const int d = degree();
        int emax = 0;
        bool nonzero = false, earlier = L_ > 1 && d <= L_ - 1;
        for (std::size_t k = 0; k < idx_.size(); ++k) {
            const auto& v = vals_[idx_[k]];
            emax = std::max(emax, v.num == 0 ? 0 : v.exp);
            nonzero |= v.num != 0;
            earlier = earlier && detail::in_level(v, L_ - 1);
        }
        if (emax != e_ || !nonzero || earlier) return false;
        if (d > 0 && vals_[idx_[idx_.size() - 1]].num == 0 && vals_[idx_[idx_.size() - 2]].num == 0) return false;
        return true;
    }
    bool advance_to_valid() {
        while (!exhausted_) {
            if (valid()) return true;
            step();
        }
        return false;
    }
    Poly current() const {
        const int d = degree();
        Poly p(d);
        p.set(0, vals_[idx_[0]].value());
        for (int n = 1; n <= d; ++n) {
            const double b = vals_[idx_[static_cast<std::size_t>(2 * n - 1)]].value();
            const double a = vals_[idx_[static_cast<std::size_t>(2 * n)]].value();
            p.set(n, Complex(0.5 * a, -0.5 * b));
            p.set(-n, Complex(0.5 * a, 0.5 * b));
        }
        return p;
    }
};

inline Poly dense_sequence(std::int64_t j) {
    require(j >= 1, "dense_sequence: j >= 1");
    DenseSequence s;
    Poly p;
    for (std::int64_t i = 0; i < j; ++i) p = s.next();
    return p;
}

// ---------------------------------------------------------------------------------------------
// Stages.

struct StageRecord {
    int j = 0;
    Poly u;
    double eps_target = 0.0;
    std::shared_ptr<const PrincipalOutput> stage;
    CoeffSeq S;                 // f_1 ... f_j
    Interval step_norm;         // ||S_j - S_{j-1}||_{A_q}
    Interval step_norm_direct;  // from the difference sequence
    double step_norm_product = 0.0;  // ||S_{j-1}||_A.hi * ||f_j - 1||_{A_q}.hi
    Interval S_a_norm;          // ||S_j||_A
    double step_target = 0.0;   // 2^{-2-j}
    bool step_ok = false;
};

struct HelsonConfig {
    double q = 4.0;
    int J = 2;
    PrincipalConfig base;
    double eps1 = 0.2;
    int outside_samples = 2048;
};

struct HelsonOutput {
    std::vector<StageRecord> stages;
    ArcSet K;
    Interval S_minus_1;        // ||S_J - 1||_{A_q}
    double max_outside = 0.0;  // max |S_J| on a complement grid (spatial)
    int outside_points = 0;
    double step_sum = 0.0;
    bool steps_ok = false;
};

// S_J(t) = prod_j f_j(t) by spatial evaluation of each stage.
inline double helson_S_at(const HelsonOutput& h, double t, std::size_t J = 0) {
    if (J == 0) J = h.stages.size();
    double v = 1.0;
    for (std::size_t i = 0; i < J && v != 0.0; ++i) v *= principal_f_at(*h.stages[i].stage, t);
    return v;
}

inline HelsonOutput run_stages(const HelsonConfig& cfg) {
    require(cfg.J >= 1, "run_stages: J >= 1");
    require(cfg.eps1 > 0.0 && cfg.eps1 < 0.25, "run_stages: eps_1 must lie in (0, 1/4)");
    HelsonOutput out;
    Interval prevA{1.0, 1.0};
    for (int j = 1; j <= cfg.J; ++j) {
        StageRecord r;
        r.j = j;
        r.u = dense_sequence(j);
        r.step_target = std::ldexp(1.0, -2 - j);
        r.eps_target = j == 1 ? cfg.eps1 : 0.9 * std::ldexp(1.0, -1 - j) / prevA.hi;
        PrincipalConfig pc = cfg.base;
        pc.q = cfg.q;
        pc.u = r.u;
        pc.eps = r.eps_target;
        pc.nu_offset = cfg.base.nu_offset + (j - 1);
        r.stage = std::make_shared<const PrincipalOutput>(run_principal(pc));
        const CoeffSeq& f = r.stage->f;
        const Interval fdef = r.stage->cert.a_q_defect;  // ||1 - f_j||_{A_q}
        if (j == 1) {
            r.S = f;
            r.step_norm_direct = fdef;
            r.step_norm_product = fdef.hi;
        } else {
            const CoeffSeq& prev = out.stages.back().S;
            r.S = product(prev, f);
            r.step_norm_direct = a_p_norm(difference(r.S, prev), cfg.q);
            r.step_norm_product = prevA.hi * fdef.hi;
        }
        r.step_norm = {r.step_norm_direct.lo, std::min(r.step_norm_direct.hi, r.step_norm_product)};
        r.S_a_norm = a_p_norm(r.S, 1.0);
        r.step_ok = r.step_norm.hi < r.step_target;
        prevA = r.S_a_norm;
        out.K = j == 1 ? r.stage->K : out.K.intersect(r.stage->K);
        out.stages.push_back(std::move(r));
    }
    out.S_minus_1 = a_p_norm(one_minus(out.stages.back().S), cfg.q);
    out.steps_ok = true;
    for (const auto& s : out.stages) {
        out.step_sum += s.step_norm.hi;
        out.steps_ok = out.steps_ok && s.step_ok;
    }
    const ArcSet outside = out.K.complement();
    if (!outside.empty()) {
        for (int i = 0; i < cfg.outside_samples; ++i) {
            const double t = outside.point_at_fraction((i + 0.5) / cfg.outside_samples);
            out.max_outside = std::max(out.max_outside, std::fabs(helson_S_at(out, t)));
            ++out.outside_points;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Helson certificate by sampled measures.

// sup_{|n| <= M} |sum_a m_a e^{-i n x_a}|.
inline double measure_sup_hat(const RealMeasure& mu, std::int64_t M) {
    double best = 0.0;
    std::vector<Complex> z(mu.size()), zn(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a) {
        z[a] = std::polar(1.0, -mu.positions[a]);
        zn[a] = 1.0;
    }
    for (std::int64_t n = 0; n <= M; ++n) {
        Complex s{};
        for (std::size_t a = 0; a < mu.size(); ++a) {
            if ((n & 63) == 0) zn[a] = std::polar(1.0, -static_cast<double>(n) * mu.positions[a]);
            s += mu.masses[a] * zn[a];
            zn[a] *= z[a];
        }
        // Real masses: |mu^(-n)| = |mu^(n)|.
        best = std::max(best, std::abs(s));
    }
    return best;
}

struct HelsonTrial {
    RealMeasure mu;
    double sup_hat = 0.0;        // over |n| <= M
    double chain_lower = 0.0;    // max_j |int P_j d mu| / ||P_j||_A
    bool chain_holds = true;     // |int P_j d mu| <= ||P_j||_A sup_n |mu^(n)| for every j
};

struct HelsonCertificate {
    double delta_hat = 0.0;
    std::size_t worst = 0;
    std::vector<HelsonTrial> trials;
    bool chain_holds = true;
};

inline HelsonCertificate helson_certificate(const ArcSet& K, const std::vector<Poly>& P_list, int trials, std::int64_t M,
                                            std::uint64_t seed = master_seed(), int max_atoms = 8) {
    require(!K.empty(), "helson_certificate: K must be nonempty");
    require(trials >= 1 && M >= 0 && max_atoms >= 1, "helson_certificate: trials >= 1, M >= 0");
    HelsonCertificate c;
    c.delta_hat = std::numeric_limits<double>::infinity();
    c.trials.resize(static_cast<std::size_t>(trials));
    std::vector<double> pa;
    std::int64_t maxdeg = 0;
    for (const auto& P : P_list) {
        pa.push_back(lp_norm(P, 1.0));
        maxdeg = std::max(maxdeg, P.degree());
    }
    parallel_for(trials, [&](std::int64_t ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::mt19937_64 rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1))));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        HelsonTrial& tr = c.trials[i];
        const int atoms = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_atoms));
        double tv = 0.0;
        for (int a = 0; a < atoms; ++a) {
            tr.mu.positions.push_back(K.point_at_fraction(U(rng)));
            const double m = 2.0 * U(rng) - 1.0;
            tr.mu.masses.push_back(m);
            tv += std::fabs(m);
        }
        for (auto& m : tr.mu.masses) m /= tv;
        tr.sup_hat = measure_sup_hat(tr.mu, M);
        if (!P_list.empty()) {
            const double sup_full = std::max(tr.sup_hat, measure_sup_hat(tr.mu, maxdeg));
            for (std::size_t j = 0; j < P_list.size(); ++j) {
                double integral = 0.0;
                for (std::size_t a = 0; a < tr.mu.size(); ++a) integral += tr.mu.masses[a] * eval(P_list[j], tr.mu.positions[a]).real();
                tr.chain_lower = std::max(tr.chain_lower, std::fabs(integral) / pa[j]);
                tr.chain_holds = tr.chain_holds && std::fabs(integral) <= pa[j] * sup_full * (1.0 + 1e-12) + 1e-12;
            }
        }
    });
    for (std::size_t i = 0; i < c.trials.size(); ++i) {
        if (c.trials[i].sup_hat < c.delta_hat) {
            c.delta_hat = c.trials[i].sup_hat;
            c.worst = i;
        }
        c.chain_holds = c.chain_holds && c.trials[i].chain_holds;
    }
    return c;
}

// ---------------------------------------------------------------------------------------------
// Extension probe: min ||f||_A + (1/eps) ||f||_{A_p} over deg f <= d with f(t_i) = h_i.

struct ExtensionResult {
    Poly f;
    double a_norm = 0.0;
    double ap_norm = 0.0;
    double objective = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool monotone = true;
    std::vector<double> history;
    double guarantee = 0.0;  // ||h||_{C(K)} / delta_hat when delta_hat is supplied
};

namespace detail {

inline double extension_objective(const std::vector<Complex>& c, double p, double eps) {
    double a = 0.0, s = 0.0;
    for (const auto& z : c) {
        const double m = std::abs(z);
        a += m;
        s += std::pow(m, p);
    }
    return a + std::pow(s, 1.0 / p) / eps;
}

inline double extension_smoothed(const std::vector<Complex>& c, double p, double eps, double mu) {
    double a = 0.0, s = 0.0;
    for (const auto& z : c) {
        const double m2 = std::norm(z) + mu * mu;
        a += std::sqrt(m2);
        s += std::pow(m2, 0.5 * p);
    }
    return a + std::pow(s, 1.0 / p) / eps;
}

}  // namespace detail

inline ExtensionResult extension_probe(const std::vector<double>& pts, const std::vector<Complex>& h, double p, double eps,
                                       std::int64_t d, double delta_hat = 0.0, const Poly* start = nullptr, int max_iter = 4000) {
    require(p > 1.0 && eps > 0.0 && d >= 0, "extension_probe: need p > 1, eps > 0, d >= 0");
    require(pts.size() == h.size(), "extension_probe: one value per point");
    const auto m = static_cast<Eigen::Index>(pts.size());
    const std::int64_t n = 2 * d + 1;
    require(static_cast<std::int64_t>(m) <= n, "extension_probe: more constraints than degrees of freedom");
    check_coeff_budget(n, "extension_probe");
    ExtensionResult r;
    r.f = Poly(d);
    bool allzero = true;
    for (const auto& v : h) allzero = allzero && v == Complex{};
    if (m == 0 || allzero) return r;

    // Gram matrix (A A^*)_{ij} = sum_{|k| <= d} e^{i k (t_i - t_j)}.
    Eigen::MatrixXcd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            Complex s{};
            for (std::int64_t k = -d; k <= d; ++k) s += std::polar(1.0, static_cast<double>(k) * (pts[i] - pts[j]));
            G(i, j) = s;
        }
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
    require(ldlt.info() == Eigen::Success, "extension_probe: interpolation system is singular");
    Eigen::VectorXcd hv(m);
    for (Eigen::Index i = 0; i < m; ++i) hv(i) = h[static_cast<std::size_t>(i)];

    auto apply_A = [&](const std::vector<Complex>& c) {
        Eigen::VectorXcd out(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            Complex s{};
            for (std::int64_t k = -d; k <= d; ++k) s += c[static_cast<std::size_t>(k + d)] * std::polar(1.0, static_cast<double>(k) * pts[i]);
            out(i) = s;
        }
        return out;
    };
    auto project = [&](std::vector<Complex>& c) {
        Eigen::VectorXcd y = ldlt.solve(apply_A(c) - hv);
        for (std::int64_t k = -d; k <= d; ++k) {
            Complex s{};
            for (Eigen::Index i = 0; i < m; ++i) s += std::conj(std::polar(1.0, static_cast<double>(k) * pts[i])) * y(i);
            c[static_cast<std::size_t>(k + d)] -= s;
        }
    };

    std::vector<Complex> c(static_cast<std::size_t>(n), Complex{});
    project(c);  // minimum-norm interpolant
    double F = detail::extension_objective(c, p, eps);
    if (start != nullptr) {
        std::vector<Complex> cs(static_cast<std::size_t>(n), Complex{});
        for (std::int64_t k = -std::min(d, start->degree()); k <= std::min(d, start->degree()); ++k)
            cs[static_cast<std::size_t>(k + d)] = (*start)[k];
        project(cs);
        const double Fs = detail::extension_objective(cs, p, eps);
        if (Fs < F) {
            c.swap(cs);
            F = Fs;
        }
    }
    r.history.push_back(F);
    double scale = 0.0;
    for (const auto& z : c) scale = std::max(scale, std::abs(z));
    for (double mu_rel : {1e-2, 1e-4, 1e-8}) {
        const double mu = mu_rel * scale;
        double tau = 1.0;
        for (int it = 0; it < max_iter; ++it) {
            double s = 0.0;
            for (const auto& z : c) s += std::pow(std::norm(z) + mu * mu, 0.5 * p);
            const double pref = std::pow(s, 1.0 / p - 1.0) / eps;
            std::vector<Complex> g(c.size());
            for (std::size_t k = 0; k < c.size(); ++k) {
                const double m2 = std::norm(c[k]) + mu * mu;
                g[k] = c[k] / std::sqrt(m2) + pref * std::pow(m2, 0.5 * p - 1.0) * c[k];
            }
            const double Fs = detail::extension_smoothed(c, p, eps, mu);
            bool accepted = false;
            for (int ls = 0; ls < 40; ++ls) {
                std::vector<Complex> cn(c.size());
                for (std::size_t k = 0; k < c.size(); ++k) cn[k] = c[k] - tau * g[k];
                project(cn);
                double move = 0.0;
                for (std::size_t k = 0; k < c.size(); ++k) move += std::norm(cn[k] - c[k]);
                const double Fn_s = detail::extension_smoothed(cn, p, eps, mu);
                const double Fn = detail::extension_objective(cn, p, eps);
                if (Fn_s <= Fs - 0.5 * move / tau && Fn <= F) {
                    const double rel = (F - Fn) / std::max(F, 1e-300);
                    c.swap(cn);
                    F = Fn;
                    r.history.push_back(F);
                    accepted = true;
                    tau *= 2.0;
                    if (rel < 1e-12 && move < 1e-24 * scale * scale) it = max_iter;
                    break;
                }
                tau *= 0.5;
            }
            ++r.iterations;
            if (!accepted) break;
        }
    }
    for (std::size_t i = 1; i < r.history.size(); ++i) r.monotone = r.monotone && r.history[i] <= r.history[i - 1];
    for (std::int64_t k = -d; k <= d; ++k) r.f.set(k, c[static_cast<std::size_t>(k + d)]);
    r.a_norm = lp_norm(r.f, 1.0);
    r.ap_norm = lp_norm(r.f, p);
    r.objective = r.a_norm + r.ap_norm / eps;
    auto Af = apply_A(c);
    for (Eigen::Index i = 0; i < m; ++i) r.residual = std::max(r.residual, std::abs(Af(i) - hv(i)));
    if (delta_hat > 0.0) {
        double hmax = 0.0;
        for (const auto& v : h) hmax = std::max(hmax, std::abs(v));
        r.guarantee = hmax / delta_hat;
    }
    return r;
}

// Sample points must lie in K.
inline ExtensionResult extension_probe(const ArcSet& K, const std::vector<double>& pts, const std::vector<Complex>& h, double p,
                                       double eps, std::int64_t d, double delta_hat = 0.0, const Poly* start = nullptr) {
    require(d >= 1, "extension_probe: d >= 1");
    for (double t : pts) require(K.contains(t), "extension_probe: sample point outside K");
    return extension_probe(pts, h, p, eps, d, delta_hat, start);
}

// Two points inside each of the `arcs` widest arcs of K, in increasing order.
inline std::vector<double> arc_sample_points(const ArcSet& K, int arcs) {
    auto all = K.pieces();
    std::sort(all.begin(), all.end(), [](const Arc& a, const Arc& b) {
        return (a.b - a.a) != (b.b - b.a) ? (a.b - a.a) > (b.b - b.a) : a.a < b.a;
    });
    const auto na = std::min<std::size_t>(static_cast<std::size_t>(std::max(arcs, 0)), all.size());
    std::vector<double> pts;
    for (std::size_t i = 0; i < na; ++i) {
        const auto& a = all[i];
        pts.push_back(a.a + 0.25 * (a.b - a.a));
        pts.push_back(a.a + 0.75 * (a.b - a.a));
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace wiener
