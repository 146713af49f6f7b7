#include <gtest/gtest.h>

#include <random>

#include "wiener/riesz.hpp"
#include "wiener/rudin_shapiro.hpp"

using namespace wiener;

namespace {

QRieszSpec cos_spec() {
    QRieszSpec s;
    s.phi = QPoly(1);
    s.phi.set(1, QComplex(Rational(1, 2)));
    s.phi.set(-1, QComplex(Rational(1, 2)));
    s.w = QPoly::constant(QComplex(1));
    s.N = 2;
    s.nu = 3;
    return s;
}

// Real polynomial with zero mean (optional) and l1 norm 1, so sup <= 1.
Poly random_real(std::mt19937_64& rng, std::int64_t d, bool zero_mean) {
    std::normal_distribution<double> G(0.0, 1.0);
    Poly p(d);
    for (std::int64_t n = zero_mean ? 1 : 0; n <= d; ++n) {
        if (n == 0) {
            p.set(0, G(rng));
            continue;
        }
        Complex c(G(rng), G(rng));
        p.set(n, c);
        p.set(-n, std::conj(c));
    }
    return p * Complex(1.0 / lp_norm(p, 1.0));
}

}  // namespace

TEST(ChooseNu, Examples) {
    EXPECT_EQ(choose_nu(1, 0, 2), 3);
    EXPECT_EQ(choose_nu(2, 1, 4), 9);
    EXPECT_EQ(choose_nu(1, 0, 1), 3);
}

TEST(Lambda, CosineExample) {
    auto spec = cos_spec();
    auto lam = riesz_lambda(spec, QComplex(Rational(1, 4)));
    EXPECT_EQ(lam[0], QComplex(1));
    Rational at0(0);
    for (std::int64_t n = -lam.degree(); n <= lam.degree(); ++n) at0 += lam[n].re;
    EXPECT_EQ(at0, Rational(25, 16));
    EXPECT_NEAR(riesz_lambda_at(spec, 0.25, 0.0), 25.0 / 16.0, 1e-15);
}

TEST(Lambda, SingleFactorSpectrum) {
    QRieszSpec s = cos_spec();
    s.N = 1;
    s.w = QPoly(1);
    s.w.set(0, QComplex(Rational(1, 2)));
    s.w.set(1, QComplex(Rational(1, 4)));
    s.w.set(-1, QComplex(Rational(1, 4)));
    auto lam = riesz_lambda(s, QComplex(Rational(1, 3)));
    for (auto n : lam.support()) {
        const bool ok = n == 0 || std::abs(std::abs(n) - 3) <= 1;
        EXPECT_TRUE(ok) << n;
    }
}

TEST(Lambda, SmallSIsNearlyOne) {
    DRieszSpec s{cos_poly(1, 1.0), Poly::constant(1.0), 3, 3};
    auto lam = riesz_lambda(s, Complex(1e-12));
    EXPECT_NEAR(std::abs(lam[0] - 1.0), 0.0, 1e-15);
    EXPECT_LE(lp_norm(lam, 1.0), 1.0 + 1e-10);
}

TEST(Lambda, GridMatchesExpansionAndPointwise) {
    std::mt19937_64 rng(11);
    DRieszSpec s{random_real(rng, 2, true), random_real(rng, 1, false), 3, 0};
    s.nu = choose_nu(2, 1, 3);
    auto lam = riesz_lambda(s, Complex(0.3));
    EXPECT_NEAR(lam[0].real(), 1.0, 1e-12);
    const std::int64_t M = 4096;
    auto g = riesz_lambda_grid(s, 0.3, M);
    auto e = eval_grid(lam, M);
    for (std::int64_t k = 0; k < M; k += 37) {
        EXPECT_NEAR(g[k], e[k].real(), 1e-11);
        EXPECT_NEAR(g[k], riesz_lambda_at(s, 0.3, kTwoPi * k / M), 1e-11);
        EXPECT_GE(g[k], std::pow(0.7, 3) - 1e-12);
    }
}

TEST(Lambda, OverBudget) {
    DRieszSpec s{cos_poly(1, 1.0), Poly::constant(1.0), 20, 3};
    EXPECT_THROW(riesz_lambda(s, Complex(0.3)), ResourceError);
}

TEST(Lambda, RejectsSmallNu) {
    DRieszSpec s{cos_poly(2, 1.0), Poly::constant(1.0), 2, 4};
    EXPECT_THROW(riesz_lambda(s, Complex(0.3)), PreconditionError);
}

TEST(Moments, ExactWorkedExamples) {
    auto spec = cos_spec();
    const QComplex s(Rational(1, 4));
    auto both = verify_moment_formula(spec, s, 0b11);
    EXPECT_EQ(both.lhs, QComplex(Rational(1, 64)));
    EXPECT_EQ(both.rhs, QComplex(Rational(1, 64)));
    auto one = verify_moment_formula(spec, s, 0b01);
    EXPECT_EQ(one.lhs, QComplex(Rational(1, 8)));
    EXPECT_EQ(one.rhs, QComplex(Rational(1, 8)));
    auto two = verify_moment_formula(spec, s, 0b10);
    EXPECT_EQ(two.lhs, two.rhs);
}

TEST(Moments, GridQuadratureAgrees) {
    DRieszSpec s{cos_poly(1, 1.0), Poly::constant(1.0), 2, 3};
    auto r = verify_moment_formula_grid(s, 0.25, 0b11);
    EXPECT_NEAR(r.lhs.real(), 1.0 / 64, 1e-14);
    EXPECT_THROW(verify_moment_formula_grid(s, 0.25, 0b11, 8), PreconditionError);
    EXPECT_THROW(verify_moment_formula_grid(s, 0.25, 0b100), PreconditionError);
}

TEST(Multiplicativity, LemmaExample) {
    QPoly P0(1), P1(1);
    P0.set(0, QComplex(1));
    P0.set(1, QComplex(Rational(1, 2)));
    P0.set(-1, QComplex(Rational(1, 2)));
    P1.set(0, QComplex(2));
    P1.set(1, QComplex(Rational(1, 2)));
    P1.set(-1, QComplex(Rational(1, 2)));
    auto [lhs, rhs] = multiplicativity_check<QComplex>({P0, P1}, 2);
    EXPECT_EQ(lhs, QComplex(2));
    EXPECT_EQ(rhs, QComplex(2));
    EXPECT_THROW(multiplicativity_check<QComplex>({P0, P1}, 1), PreconditionError);
}

TEST(Multiplicativity, RandomAgainstQuadrature) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const std::int64_t nu = 3 + trial % 3;
        std::vector<Poly> P;
        for (int j = 0; j < 4; ++j) {
            Poly p = random_real(rng, nu - 1, false);
            p.add(0, 0.5);
            P.push_back(p);
        }
        auto [lhs, rhs] = multiplicativity_check(P, nu);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
        // Independent oracle: trapezoid quadrature on a grid finer than the total degree.
        std::int64_t deg = 0, f = 1;
        for (int j = 0; j < 4; ++j, f *= nu) deg += f * (nu - 1);
        const std::int64_t M = 2 * deg + 2;
        double acc = 0;
        for (std::int64_t k = 0; k < M; ++k) {
            double v = 1, g = 1;
            for (int j = 0; j < 4; ++j, g *= double(nu)) v *= eval(P[j], kTwoPi * double(k) * g / double(M)).real();
            acc += v;
        }
        EXPECT_NEAR(acc / double(M), rhs.real(), 1e-9);
    }
}

// All nonempty subsets for 20 random specs, by exact quadrature; plus equal expectations and Jensen.
TEST(Moments, RandomSpecsAllSubsets) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t dphi = 1 + trial % 2;
        const std::int64_t dw = trial % 3 == 0 ? 1 : 0;
        int N = 2 + trial % 5;
        DRieszSpec s{random_real(rng, dphi, true), random_real(rng, dw, false), N, 0};
        while (true) {
            s.N = N;
            s.nu = choose_nu(dphi, dw, N);
            if (s.lambda_degree() <= 60000) break;
            --N;
        }
        const double sv = U(rng);
        const std::int64_t M = next_pow2(2 * s.lambda_degree() + 1);
        auto lam = riesz_lambda_grid(s, sv, M);
        auto X = riesz_variables_grid(s, M);
        const std::uint64_t S = std::uint64_t{1} << s.N;
        std::vector<double> E(S, 0.0), prod(S);
        for (std::int64_t k = 0; k < M; ++k) {
            prod[0] = lam[k];
            for (std::uint64_t A = 1; A < S; ++A)
                prod[A] = prod[A & (A - 1)] * X[static_cast<std::size_t>(std::countr_zero(A))][k];
            for (std::uint64_t A = 1; A < S; ++A) E[A] += prod[A];
        }
        const double phi2 = l2_norm_squared(s.phi).real();
        for (std::uint64_t A = 1; A < S; ++A) {
            const int c = std::popcount(A);
            const double rhs = std::pow(sv * phi2, c) * mean_of_power(s.w, 2 * c).real();
            EXPECT_NEAR(E[A] / double(M), rhs, 1e-10) << "trial " << trial << " A " << A;
            EXPECT_GE(E[A] / double(M), std::pow(E[1] / double(M), c) - 1e-12);
        }
        for (int j = 0; j < s.N; ++j) EXPECT_NEAR(E[std::uint64_t{1} << j] / double(M), E[1] / double(M), 1e-12);
    }
}

TEST(Probability, NormalizedAndPositive) {
    DRieszSpec s{cos_poly(1, 1.0), Poly::constant(1.0), 3, 3};
    auto P = riesz_probability(s, 0.3);
    EXPECT_LE(P.normalization_deviation, 1e-12);
    EXPECT_GE(P.min_lambda, P.lambda_lower_bound);
    auto r = check_almost_multiplicative(P.space, P.X, 1e-9);
    // Relative deviation equals the Jensen excess int w^{2|A|}/(int w^2)^{|A|} - 1 = 0 for w = 1.
    EXPECT_LE(r.max_relative_deviation, 1e-10);
    EXPECT_NEAR(r.mu, 0.15, 1e-12);
}

TEST(Concentration, ConstantFromFormula) {
    EXPECT_NEAR(concentration_c2(2e-5), std::pow(0.01 - 2e-5, 2) / 8 - 2e-5 / 3, 1e-18);
    EXPECT_GT(concentration_c2(2e-5), 0.0);
    EXPECT_LT(concentration_c2(0.05), 0.0);
}

TEST(Concentration, TheoreticalHolds) {
    auto phi = build_phi(4.0, 0.5);
    for (int N = 1; N <= 3; ++N) {
        DRieszSpec s{phi.phi, Poly::constant(1.0), N, choose_nu(2, 0, N)};
        auto r = l2_concentration_check(s, 0.3, 2e-5, true);
        EXPECT_TRUE(r.holds);
        EXPECT_LE(r.lhs_enclosure.lo, r.lhs_enclosure.hi + 1e-12);
        EXPECT_NEAR(r.rhs, 2 * std::exp(-concentration_c2(2e-5) * N), 1e-15);
        EXPECT_FALSE(r.relaxed);
    }
}

TEST(Concentration, EnclosureContainsRiemannSum) {
    auto phi = build_phi(4.0, 0.5);
    DRieszSpec s{phi.phi, Poly::constant(1.0), 3, 5};
    auto r = l2_concentration_check(s, 0.3, 0.05, false);
    const std::int64_t M = 1 << 20;
    auto lam = riesz_lambda_grid(s, 0.3, M);
    auto X = riesz_variables_grid(s, M);
    double acc = 0;
    for (std::int64_t k = 0; k < M; ++k) {
        double x = 0;
        for (int j = 0; j < 3; ++j) x += X[j][k];
        if (x / 3 < 0.05) acc += lam[k] * lam[k];
    }
    acc /= double(M);
    EXPECT_NEAR(acc, r.lhs, 1e-3);
    EXPECT_GT(acc, r.lhs_enclosure.lo - 1e-3);
    EXPECT_LT(r.lhs, 1.0);
}

TEST(Concentration, Preconditions) {
    DRieszSpec s{cos_poly(1, 1.0), Poly::constant(1.0), 2, 3};
    EXPECT_THROW(l2_concentration_check(s, 0.3, 0.01, true), PreconditionError);
    EXPECT_THROW(l2_concentration_check(s, 0.2, 1e-5, true), PreconditionError);
}
