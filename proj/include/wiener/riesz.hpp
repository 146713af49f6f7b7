#pragma once

#include <optional>
#include <vector>

#include "concentration.hpp"
#include "gridcert.hpp"

namespace wiener {

inline std::int64_t choose_nu(std::int64_t deg_phi, std::int64_t deg_w, int N) {
    require(N >= 1, "choose_nu: N >= 1");
    require(deg_phi >= 1 || deg_w >= 0, "choose_nu: degrees must be nonnegative");
    return 2 * std::max<std::int64_t>(deg_phi, static_cast<std::int64_t>(N) * deg_w) + 1;
}

template <class T>
struct RieszSpec {
    TrigPoly<T> phi;
    TrigPoly<T> w;
    int N = 1;
    std::int64_t nu = 3;

    std::int64_t lambda_degree() const {
        std::int64_t d = 0, p = 1;
        for (int j = 1; j <= N; ++j) {
            p *= nu;
            d += p * phi.effective_degree();
        }
        return d + N * w.effective_degree();
    }

    void validate() const {
        require(N >= 1, "RieszSpec: N >= 1");
        require(nu > 2 * std::max<std::int64_t>(phi.effective_degree(), N * w.effective_degree()),
                "RieszSpec: nu must exceed 2 max{deg phi, N deg w}");
        require(coeff_is_zero(phi[0]), "RieszSpec: phi must have zero mean");
    }
};

using DRieszSpec = RieszSpec<Complex>;
using QRieszSpec = RieszSpec<QComplex>;

template <class T>
TrigPoly<T> dilated_phi(const RieszSpec<T>& spec, int j) {
    std::int64_t f = 1;
    for (int i = 0; i < j; ++i) f *= spec.nu;
    return dilate(spec.phi, f);
}

// X_j = w(t) phi(nu^j t).
template <class T>
TrigPoly<T> riesz_variable(const RieszSpec<T>& spec, int j) {
    return multiply(spec.w, dilated_phi(spec, j));
}

// lambda_s = prod_{j=1}^N (1 + s w(t) phi(nu^j t)) as a full coefficient expansion.
template <class T>
TrigPoly<T> riesz_lambda(const RieszSpec<T>& spec, const T& s) {
    spec.validate();
    check_coeff_budget(2 * spec.lambda_degree() + 1, "riesz_lambda (degree " + std::to_string(spec.lambda_degree()) + ")");
    TrigPoly<T> lam = TrigPoly<T>::constant(T(1));
    for (int j = 1; j <= spec.N; ++j) {
        TrigPoly<T> factor = riesz_variable(spec, j);
        factor *= s;
        factor.add(0, T(1));
        lam = multiply(lam, factor);
    }
    return lam.trimmed();
}

// Pointwise evaluator, O(N (deg phi + deg w)).
template <class T>
double riesz_lambda_at(const RieszSpec<T>& spec, double s, double t) {
    const double wt = eval(spec.w, t).real();
    double v = 1.0, f = 1.0;
    for (int j = 1; j <= spec.N; ++j) {
        f *= static_cast<double>(spec.nu);
        v *= 1.0 + s * wt * eval(spec.phi, wrap_2pi(f * t)).real();
    }
    return v;
}

// lambda_s at the grid points 2 pi k / M without expanding the product.
inline std::vector<double> riesz_lambda_grid(const DRieszSpec& spec, double s, std::int64_t M) {
    spec.validate();
    auto wv = eval_grid_real(spec.w, M);
    auto pv = eval_grid_real(spec.phi, M);
    std::vector<double> lam(static_cast<std::size_t>(M), 1.0);
    std::int64_t f = 1;
    for (int j = 1; j <= spec.N; ++j) {
        f = (f * (spec.nu % M)) % M;
        for (std::int64_t k = 0; k < M; ++k) {
            const auto idx = static_cast<std::size_t>((static_cast<__int128>(f) * k) % M);
            lam[static_cast<std::size_t>(k)] *= 1.0 + s * wv[static_cast<std::size_t>(k)] * pv[idx];
        }
    }
    return lam;
}

// X_j on the same grid.
inline RandomVariables riesz_variables_grid(const DRieszSpec& spec, std::int64_t M) {
    auto wv = eval_grid_real(spec.w, M);
    auto pv = eval_grid_real(spec.phi, M);
    RandomVariables X(static_cast<std::size_t>(spec.N), std::vector<double>(static_cast<std::size_t>(M)));
    std::int64_t f = 1;
    for (int j = 1; j <= spec.N; ++j) {
        f = (f * (spec.nu % M)) % M;
        for (std::int64_t k = 0; k < M; ++k) {
            const auto idx = static_cast<std::size_t>((static_cast<__int128>(f) * k) % M);
            X[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)] = wv[static_cast<std::size_t>(k)] * pv[idx];
        }
    }
    return X;
}

// Lemma-style multiplicativity: int prod P_j(nu^j t) dt/2pi against prod of means.
template <class T>
std::pair<T, T> multiplicativity_check(const std::vector<TrigPoly<T>>& P, std::int64_t nu) {
    require(!P.empty(), "multiplicativity_check: need polynomials");
    for (const auto& p : P) require(p.effective_degree() < nu, "multiplicativity_check: deg P_j < nu required");
    TrigPoly<T> prod = TrigPoly<T>::constant(T(1));
    T rhs(1);
    std::int64_t f = 1;
    for (std::size_t j = 0; j < P.size(); ++j) {
        prod = multiply(prod, dilate(P[j], f));
        rhs *= P[j][0];
        f *= nu;
    }
    return {prod[0], rhs};
}

template <class T>
T mean_of_power(const TrigPoly<T>& f, int k) {
    TrigPoly<T> p = TrigPoly<T>::constant(T(1));
    for (int i = 0; i < k; ++i) p = multiply(p, f);
    return p[0];
}

template <class T>
T l2_norm_squared(const TrigPoly<T>& f) {
    T acc{};
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) acc += f[n] * coeff_conj(f[n]);
    return acc;
}

template <class T>
struct MomentCheck {
    T lhs{};
    T rhs{};
    double abs_error = 0.0;
};

// E_{mu_s}[prod_{j in A} X_j] against (s ||phi||^2)^{|A|} int w^{2|A|}; A is a bit mask over 1..N.
template <class T>
MomentCheck<T> verify_moment_formula(const RieszSpec<T>& spec, const T& s, std::uint64_t A,
                                     const TrigPoly<T>* lambda = nullptr) {
    require(A != 0 && A < (std::uint64_t{1} << spec.N), "verify_moment_formula: A must be a nonempty subset");
    TrigPoly<T> lam = lambda ? *lambda : riesz_lambda(spec, s);
    TrigPoly<T> prod = lam;
    int card = 0;
    for (int j = 1; j <= spec.N; ++j) {
        if (!((A >> (j - 1)) & 1u)) continue;
        ++card;
        prod = multiply(prod, riesz_variable(spec, j));
    }
    MomentCheck<T> r;
    r.lhs = prod[0];
    T base = s * l2_norm_squared(spec.phi);
    T rhs(1);
    for (int i = 0; i < card; ++i) rhs *= base;
    rhs *= mean_of_power(spec.w, 2 * card);
    r.rhs = rhs;
    r.abs_error = std::abs(as_complex(r.lhs) - as_complex(r.rhs));
    return r;
}

// Same identity by grid quadrature, exact once the grid exceeds the integrand degree.
inline MomentCheck<Complex> verify_moment_formula_grid(const DRieszSpec& spec, double s, std::uint64_t A,
                                                       std::int64_t M = 0) {
    require(A != 0 && A < (std::uint64_t{1} << spec.N), "verify_moment_formula: A must be a nonempty subset");
    const std::int64_t need = 2 * spec.lambda_degree() + 1;
    if (M == 0) M = next_pow2(need);
    require(M >= need, "verify_moment_formula: grid too small for exact quadrature");
    check_grid_budget(M, "verify_moment_formula_grid");
    auto lam = riesz_lambda_grid(spec, s, M);
    auto X = riesz_variables_grid(spec, M);
    double acc = 0.0;
    int card = 0;
    for (int j = 1; j <= spec.N; ++j) card += (A >> (j - 1)) & 1u;
    for (std::int64_t k = 0; k < M; ++k) {
        double v = lam[static_cast<std::size_t>(k)];
        for (int j = 1; j <= spec.N; ++j)
            if ((A >> (j - 1)) & 1u) v *= X[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k)];
        acc += v;
    }
    MomentCheck<Complex> r;
    r.lhs = acc / static_cast<double>(M);
    const double base = s * l2_norm_squared(spec.phi).real();
    r.rhs = std::pow(base, card) * mean_of_power(spec.w, 2 * card).real();
    r.abs_error = std::abs(r.lhs - r.rhs);
    return r;
}

// Probability space (grid, lambda_s / sum lambda_s) and the variables X_j on it.
struct RieszProbability {
    DiscreteProbSpace space;
    RandomVariables X;
    double normalization_deviation = 0.0;  // |mean(lambda on grid) - 1|
    double min_lambda = 0.0;
    double lambda_lower_bound = 0.0;  // (1 - s)^N
    std::int64_t grid = 0;
};

inline RieszProbability riesz_probability(const DRieszSpec& spec, double s, std::int64_t M = 0) {
    if (M == 0) M = next_pow2(2 * spec.lambda_degree() + 1);
    check_grid_budget(M, "riesz_probability");
    auto lam = riesz_lambda_grid(spec, s, M);
    double sum = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double v : lam) {
        sum += v;
        mn = std::min(mn, v);
    }
    std::vector<double> w(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) w[i] = lam[i] / sum;
    RieszProbability r{DiscreteProbSpace(std::move(w)), riesz_variables_grid(spec, M),
                       std::fabs(sum / static_cast<double>(M) - 1.0), mn, std::pow(1.0 - s, spec.N), M};
    return r;
}

// Lemma 3.4 constants.
inline double concentration_c2(double c1) { return std::pow(0.01 - c1, 2) / 8.0 - c1 / 3.0; }

struct ConcentrationCheck {
    double lhs = 0.0;      // int_{X < c1} lambda_s^2, midpoint of the enclosure
    Interval lhs_enclosure;
    double rhs = 0.0;      // 2 e^{-c2 N}
    double c2 = 0.0;
    bool holds = false;
    bool theoretical = false;
    bool relaxed = false;  // L^2 preconditions not met
    double expectation_X = 0.0;
    std::int64_t arcs = 0;
};

// int_{X < c1} lambda_s^2 dt/2pi via exact arc integrals of lambda_s^2 over the certified sublevel sets.
inline ConcentrationCheck l2_concentration_check(const DRieszSpec& spec, double s, double c1, bool theoretical) {
    spec.validate();
    require(s > 0.25 && s < 1.0 / 3.0, "l2_concentration_check: s must lie in (1/4, 1/3)");
    ConcentrationCheck r;
    r.theoretical = theoretical;
    r.c2 = concentration_c2(c1);
    if (theoretical) require(c1 < 0.01 && r.c2 > 0.0, "l2_concentration_check: theoretical mode needs c1 < 1/100 with c2 > 0");
    const double phi_l2 = std::sqrt(l2_norm_squared(spec.phi).real());
    const double w2 = mean_of_power(spec.w, 2).real();
    r.relaxed = !(phi_l2 >= 0.5 - 1e-12 && std::pow(w2, spec.N) > 1.0 / (1.0 + std::exp(-spec.N)) - 1e-15);
    Poly lam = riesz_lambda(spec, Complex(s));
    Poly lam2 = multiply(lam, lam);
    Poly X(0);
    for (int j = 1; j <= spec.N; ++j) X += dilated_phi(spec, j);
    X = multiply(spec.w, X) * Complex(1.0 / spec.N);
    r.expectation_X = s * phi_l2 * phi_l2 * w2;
    auto E = superlevel_arcs(X, c1, 16, 1e-12);
    ArcSet below_hi = E.inner.complement(), below_lo = E.outer.complement();
    r.arcs = static_cast<std::int64_t>(below_hi.pieces().size());
    auto integral = [&](const ArcSet& K) {
        if (K.empty()) return 0.0;
        auto [w, err] = arc_fourier_window(lam2, K, 0);
        (void)err;
        return w[0].real();
    };
    r.lhs_enclosure = {integral(below_lo), integral(below_hi)};
    r.lhs = r.lhs_enclosure.hi;
    r.rhs = 2.0 * std::exp(-r.c2 * spec.N);
    r.holds = r.lhs_enclosure.hi <= r.rhs;
    return r;
}

}  // namespace wiener
