#include <gtest/gtest.h>

#include <random>

#include "wiener/gridcert.hpp"

using namespace wiener;

namespace {

Poly random_real_poly(std::mt19937_64& rng, std::int64_t d) {
    std::normal_distribution<double> N(0.0, 1.0);
    Poly p(d);
    p.set(0, N(rng));
    for (std::int64_t n = 1; n <= d; ++n) {
        Complex c(N(rng), N(rng));
        p.set(n, c);
        p.set(-n, std::conj(c));
    }
    return p;
}

double dense_max_abs(const Poly& f, int samples) {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(eval(f, kTwoPi * i / samples)));
    return m;
}

}  // namespace

TEST(ArcSetOps, CanonicalFormAndSetAlgebra) {
    ArcSet a = ArcSet::from_arcs({{1.0, 2.0}, {1.5, 3.0}, {6.0, 7.0}});
    auto arcs = a.arcs();
    ASSERT_EQ(arcs.size(), 2u);
    EXPECT_DOUBLE_EQ(arcs[0].a, 1.0);
    EXPECT_DOUBLE_EQ(arcs[0].b, 3.0);
    EXPECT_NEAR(arcs[1].a, 6.0, 1e-15);
    EXPECT_NEAR(arcs[1].b, 7.0, 1e-12);
    EXPECT_NEAR(a.measure(), 3.0, 1e-12);
    EXPECT_TRUE(a.contains(0.5));
    EXPECT_TRUE(a.contains(2.5));
    EXPECT_FALSE(a.contains(4.0));
    ArcSet b = ArcSet::from_arcs({{2.5, 6.5}});
    ArcSet i = a.intersect(b);
    EXPECT_NEAR(i.measure(), 0.5 + 0.5, 1e-12);
    ArcSet u = a.unite(b);
    EXPECT_NEAR(u.measure(), 6.0, 1e-12);
    EXPECT_NEAR(a.complement().measure(), kTwoPi - 3.0, 1e-12);
    EXPECT_NEAR(a.dilate(0.1).measure(), 3.4, 1e-12);
    EXPECT_NEAR(a.dilate(0.1).erode(0.1).measure(), 3.0, 1e-12);
}

TEST(CertifiedSup, Examples) {
    auto c = certified_sup(cos_poly(1), 32);
    EXPECT_EQ(c.grid, 64);
    EXPECT_GE(c.bound, 1.0);
    EXPECT_LE(c.bound, 1.0 / (1.0 - kPi / 64.0));
    EXPECT_NEAR(c.first_order, 1.0 / (1.0 - kPi / 64.0), 1e-12);
    EXPECT_EQ(certified_sup(Poly(3), 8).bound, 0.0);
    auto e = certified_sup(Poly::monomial(5, 1.0), 8);
    EXPECT_GE(e.bound, 1.0);
    EXPECT_LE(e.bound, 1.0 / (1.0 - 5.0 * kPi / static_cast<double>(e.grid)));
}

TEST(CertifiedSup, DominatesDenseSamplingAndShrinks) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Poly f = random_real_poly(rng, 9);
        double dense = dense_max_abs(f, 200000);
        double prev = std::numeric_limits<double>::infinity();
        for (int gf : {4, 8, 16, 32, 64}) {
            auto c = certified_sup(f, gf);
            EXPECT_GE(c.bound, dense * (1 - 1e-12));
            EXPECT_GE(c.bound, c.grid_max);
            EXPECT_LE(c.bound, prev * (1 + 1e-12));
            prev = c.bound;
        }
    }
}

TEST(CertifiedSup, ComplexPolynomial) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> N(0.0, 1.0);
    Poly f(6);
    for (std::int64_t n = -6; n <= 6; ++n) f.set(n, {N(rng), N(rng)});
    auto c = certified_sup(f, 16);
    EXPECT_GE(c.bound, dense_max_abs(f, 200000) * (1 - 1e-12));
}

TEST(CertifiedMinAbs, Examples) {
    Poly f = cos_poly(1);
    f.add(0, 2.0);
    auto c = certified_min_abs_and_sign(f, ArcSet::full(), 16);
    EXPECT_EQ(c.sign, SignVerdict::positive);
    EXPECT_LE(c.lower_bound, 1.0);
    EXPECT_GE(c.lower_bound, 1.0 - 3.0 * c.slack - 1e-9);
    auto m = certified_min_abs_and_sign(cos_poly(1), ArcSet::from_arcs({{0.0, kPi}}), 16);
    EXPECT_EQ(m.sign, SignVerdict::mixed);
    auto one = certified_min_abs_and_sign(Poly::constant(1.0), ArcSet::from_arcs({{0.3, 0.4}}), 8);
    EXPECT_EQ(one.sign, SignVerdict::positive);
    EXPECT_NEAR(one.lower_bound, 1.0, 1e-12);
    EXPECT_THROW(certified_min_abs_and_sign(Poly::constant(1.0), ArcSet(), 8), PreconditionError);
}

TEST(CertifiedMinAbs, LowerBoundIsSoundOnRandomArcs) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(0.0, kTwoPi);
    for (int trial = 0; trial < 20; ++trial) {
        Poly f = random_real_poly(rng, 7);
        f.add(0, 6.0);
        double a = U(rng);
        ArcSet K = ArcSet::from_arcs({{a, a + 0.7}});
        auto c = certified_min_abs_and_sign(f, K, 8);
        double true_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 20000; ++i) true_min = std::min(true_min, std::fabs(eval(f, a + 0.7 * i / 20000.0).real()));
        EXPECT_LE(c.lower_bound, true_min + 1e-12);
    }
}

TEST(Superlevel, CosineZeroCrossings) {
    auto r = superlevel_arcs(cos_poly(1), 0.0, 16, 1e-10);
    // {cos >= 0} = [3pi/2, 2pi] u [0, pi/2].
    EXPECT_EQ(r.crossings, 2);
    EXPECT_NEAR(r.inner.measure(), kPi, 1e-9);
    EXPECT_NEAR(r.outer.measure(), kPi, 1e-9);
    EXPECT_LE(r.inner.measure(), r.outer.measure());
    EXPECT_LE(r.outer.measure() - r.inner.measure(), 2 * 1e-10 + 1e-15);
    EXPECT_TRUE(r.inner.contains(0.0));
    EXPECT_TRUE(r.inner.contains(kPi / 2 - 1e-9));
    EXPECT_FALSE(r.outer.contains(kPi / 2 + 1e-9));
    auto arcs = r.inner.arcs();
    ASSERT_EQ(arcs.size(), 1u);
    EXPECT_NEAR(arcs[0].a, 1.5 * kPi, 1e-9);
    EXPECT_NEAR(arcs[0].b, 2.5 * kPi, 1e-9);
}

TEST(Superlevel, WholeCircleAndDegenerate) {
    auto r = superlevel_arcs(cos_poly(1), -1.5, 16);
    EXPECT_TRUE(r.inner.is_full());
    Poly c = Poly::constant(0.25);
    EXPECT_THROW(superlevel_arcs(c, 0.25, 16), PreconditionError);
}

TEST(Superlevel, Cos2tHalf) {
    auto r = superlevel_arcs(cos_poly(2), 0.5, 16, 1e-12);
    auto arcs = r.inner.arcs();
    ASSERT_EQ(arcs.size(), 2u);
    // Centers 0 (wrapping arc) and pi, half width pi/6 from cos 2t = 1/2.
    EXPECT_NEAR(arcs[0].a, kPi - kPi / 6, 1e-8);
    EXPECT_NEAR(arcs[0].b, kPi + kPi / 6, 1e-8);
    EXPECT_NEAR(arcs[1].a, kTwoPi - kPi / 6, 1e-8);
    EXPECT_NEAR(arcs[1].b, kTwoPi + kPi / 6, 1e-8);
}

TEST(Superlevel, SandwichOnRandomPolynomials) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        Poly f = random_real_poly(rng, 12);
        auto r = superlevel_arcs(f, 0.3, 16, 1e-10);
        Poly g = f;
        g.add(0, -0.3);
        if (!r.inner.empty()) {
            auto c = certified_min_abs_and_sign(g, r.inner.erode(1e-9), 16);
            EXPECT_NE(c.sign, SignVerdict::negative);
            EXPECT_NE(c.sign, SignVerdict::mixed);
        }
        for (int i = 0; i < 20000; ++i) {
            double t = kTwoPi * (i + 0.5) / 20000;
            double v = eval(g, t).real();
            if (r.inner.contains(t)) {
                EXPECT_GE(v, -1e-12);
            }
            if (!r.outer.contains(t)) {
                EXPECT_LT(v, 1e-12);
            }
        }
    }
}

TEST(ArcFourier, Examples) {
    ArcSet half = ArcSet::from_arcs({{0.0, kPi}});
    Poly one = Poly::constant(1.0);
    EXPECT_NEAR(std::abs(arc_fourier_integral(one, half, 0) - Complex(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(arc_fourier_integral(one, half, 1) - Complex(0.0, -1.0 / kPi)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(arc_fourier_integral(Poly::monomial(1, 1.0), ArcSet::full(), 1) - Complex(1.0)), 0.0, 1e-15);
}

TEST(ArcFourier, FullCircleRecoversCoefficients) {
    std::mt19937_64 rng(15);
    Poly f = random_real_poly(rng, 6);
    for (std::int64_t n = -8; n <= 8; ++n) EXPECT_NEAR(std::abs(arc_fourier_integral(f, ArcSet::full(), n) - f[n]), 0.0, 1e-14);
}

TEST(ArcFourier, QuadratureOracle) {
    std::mt19937_64 rng(16);
    Poly f = random_real_poly(rng, 4);
    ArcSet K = ArcSet::from_arcs({{0.2, 0.9}, {2.0, 2.1}, {5.5, 6.8}});
    for (std::int64_t n : {-3, 0, 2, 7}) {
        Complex total{};
        for (const auto& a : K.arcs()) {
            const int m = 20000;
            double h = (a.b - a.a) / m;
            Complex s{};
            for (int i = 0; i <= m; ++i) {
                double t = a.a + i * h;
                double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
                s += w * eval(f, t) * std::polar(1.0, -static_cast<double>(n) * t);
            }
            total += s * (h / 3.0 / kTwoPi);
        }
        EXPECT_NEAR(std::abs(arc_fourier_integral(f, K, n) - total), 0.0, 1e-10);
    }
}

TEST(ArcFourier, WindowMatchesPointwise) {
    std::mt19937_64 rng(17);
    Poly f = random_real_poly(rng, 5);
    std::vector<Arc> arcs;
    std::uniform_real_distribution<double> U(0.0, kTwoPi);
    for (int i = 0; i < 40; ++i) {
        double a = U(rng);
        arcs.push_back({a, a + 0.01});
    }
    ArcSet K = ArcSet::from_arcs(arcs);
    auto [w, err] = arc_fourier_window(f, K, 50);
    for (std::int64_t n = -50; n <= 50; ++n) EXPECT_LE(std::abs(w[n] - arc_fourier_integral(f, K, n)), err + 1e-14);
}

TEST(EndpointTransform, TaylorFftMatchesDirect) {
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> U(0.0, kTwoPi);
    std::vector<double> xs, ws;
    for (int i = 0; i < 300; ++i) {
        xs.push_back(U(rng));
        ws.push_back(i % 2 ? 1.0 : -1.0);
    }
    auto fast = endpoint_transform(xs, ws, 5000, 0.0);
    EXPECT_GT(fast.taylor_terms, 0);
    for (std::int64_t k : {-5000, -1234, 0, 1, 777, 4999}) {
        Complex d{};
        for (std::size_t j = 0; j < xs.size(); ++j) d += ws[j] * std::polar(1.0, -static_cast<double>(k) * xs[j]);
        EXPECT_LE(std::abs(fast.values[static_cast<std::size_t>(k + 5000)] - d), fast.error_bound + 1e-10);
        EXPECT_LE(std::abs(fast.values[static_cast<std::size_t>(k + 5000)] - d), 1e-10);
    }
}
