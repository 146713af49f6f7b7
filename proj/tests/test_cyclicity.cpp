#include <gtest/gtest.h>

#include <random>

#include "wiener/cyclicity.hpp"

using namespace wiener;

namespace {

Poly one_minus_e() {
    Poly f(1);
    f.set(0, 1.0);
    f.set(1, -1.0);
    return f;
}

double direct_deficit(const Poly& f, const Poly& P, double p) {
    Poly r = multiply(P, f) * Complex(-1.0);
    r.add(0, 1.0);
    return lp_norm(r, p);
}

}  // namespace

TEST(Deficit, LeastSquaresExample) {
    auto r = multiplier_deficit(one_minus_e(), 2.0, 0);
    EXPECT_NEAR(r.value, std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(r.multiplier[0].real(), 0.5, 1e-12);
    EXPECT_LT(r.optimality, 1e-8);
    EXPECT_FALSE(r.upper_bound);
}

TEST(Deficit, ConstantOne) {
    for (std::int64_t d : {0, 3}) {
        auto r = multiplier_deficit(Poly::constant(1.0), 1.5, d);
        EXPECT_NEAR(r.value, 0.0, 1e-12);
    }
}

TEST(Deficit, TaperBound) {
    double prev = 1.0;
    for (std::int64_t d : {2, 6, 14}) {
        auto r = multiplier_deficit(one_minus_e(), 1.5, d);
        EXPECT_LE(r.value, std::pow(d + 2.0, -1.0 / 3.0) + 1e-8);
        EXPECT_LT(r.value, prev);
        EXPECT_TRUE(r.upper_bound);
        EXPECT_NEAR(direct_deficit(one_minus_e(), r.multiplier, 1.5), r.value, 1e-12);
        prev = r.value;
    }
}

TEST(Deficit, IterativeMatchesLeastSquares) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> G;
    for (int trial = 0; trial < 3; ++trial) {
        Poly f(4);
        for (std::int64_t n = -4; n <= 4; ++n) f.set(n, Complex(G(rng), G(rng)));
        DeficitOptions opt;
        opt.iterative = true;
        auto a = multiplier_deficit(CoeffSeq(f), 2.0, 3);
        auto b = multiplier_deficit(CoeffSeq(f), 2.0, 3, nullptr, opt);
        EXPECT_NEAR(a.value, b.value, 1e-6);
    }
}

TEST(Deficit, ScalingInvariance) {
    Poly f = one_minus_e() + cos_poly(2) * Complex(0.3);
    for (double p : {1.5, 2.0}) {
        auto a = multiplier_deficit(f, p, 6);
        auto b = multiplier_deficit(f * Complex(3.7, -1.2), p, 6);
        EXPECT_NEAR(a.value, b.value, 1e-8);
    }
}

TEST(Deficit, MonotoneInP) {
    Poly f = one_minus_e() + sin_poly(3) * Complex(0.2);
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {1.2, 1.5, 1.8, 2.0}) {
        auto r = multiplier_deficit(f, p, 4);
        EXPECT_LE(r.value, prev + 1e-8);
        prev = r.value;
    }
}

TEST(Deficit, TailInterval) {
    CoeffSeq f(one_minus_e(), 1e-6, 3.0, 1e-9);
    auto r = multiplier_deficit(f, 1.5, 2);
    EXPECT_LT(r.interval.lo, r.value);
    EXPECT_GT(r.interval.hi, r.value);
    EXPECT_LT(r.interval.hi - r.interval.lo, 1e-4);
}

TEST(Deficit, Preconditions) {
    EXPECT_THROW(multiplier_deficit(Poly(3), 1.5, 2), PreconditionError);
    EXPECT_THROW(multiplier_deficit(one_minus_e(), 2.5, 2), PreconditionError);
    EXPECT_THROW(multiplier_deficit(one_minus_e(), 1.5, -1), PreconditionError);
}

TEST(Profile, NonincreasingAndTaper) {
    auto prof = cyclicity_profile(CoeffSeq(one_minus_e()), 1.5, {14, 0, 2, 6, 1});
    ASSERT_EQ(prof.size(), 5u);
    for (std::size_t i = 1; i < prof.size(); ++i) {
        EXPECT_GT(prof[i].d, prof[i - 1].d);
        EXPECT_LE(prof[i].deficit.value, prof[i - 1].deficit.value);
        EXPECT_LE(prof[i].deficit.value, std::pow(prof[i].d + 2.0, -1.0 / 3.0) + 1e-8);
    }
}

TEST(Obstruction, DisjointSpectrumExample) {
    Poly S(1);
    for (int n = -1; n <= 1; ++n) S.set(n, 1.0);
    Poly f(3);
    f.set(3, 1.0);
    auto o = obstruction_bound(CoeffSeq(S), CoeffSeq(f), 3.0, 1);
    EXPECT_EQ(o.residual_numeric, 0.0);
    EXPECT_EQ(o.residual_used, 0.0);
    EXPECT_NEAR(o.bound, std::pow(3.0, -1.0 / 3.0), 1e-10);
    // true minimum is 1 at P = 0
    EXPECT_LE(o.bound, multiplier_deficit(f, 1.5, 1).value + 1e-12);
}

TEST(Obstruction, NonAnnihilatingDegrades) {
    Poly f = one_minus_e();
    auto o = obstruction_bound(CoeffSeq(f), CoeffSeq(f), 3.0, 1, 1.0);
    EXPECT_GT(o.residual_numeric, 0.0);
    EXPECT_LT(o.bound, 1.0 / a_p_norm(CoeffSeq(f), 3.0).hi);
}

TEST(Obstruction, ZeroMeanIsVacuous) {
    auto o = obstruction_bound(CoeffSeq(cos_poly(1)), CoeffSeq(cos_poly(9)), 3.0, 2);
    EXPECT_EQ(o.bound, 0.0);
    EXPECT_THROW(obstruction_bound(CoeffSeq(Poly(2)), CoeffSeq(cos_poly(9)), 3.0, 2), PreconditionError);
}

TEST(Obstruction, HolderOverRandomMultipliers) {
    // S spectrum in [-2, 2], f spectrum in [10, 12]: pairing vanishes for |n| <= 7.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> G;
    Poly S(2), f(12);
    for (int n = -2; n <= 2; ++n) S.set(n, Complex(G(rng), G(rng)));
    for (int n = 10; n <= 12; ++n) f.set(n, Complex(G(rng), G(rng)));
    const double q = 4.0, p = 4.0 / 3.0;
    auto o = obstruction_bound(CoeffSeq(S), CoeffSeq(f), q, 7);
    EXPECT_EQ(o.residual_numeric, 0.0);
    EXPECT_NEAR(o.bound, std::abs(S[0]) / lp_norm(S, q), 1e-12);
    for (int trial = 0; trial < 200; ++trial) {
        Poly P(7);
        for (int n = -7; n <= 7; ++n) P.set(n, Complex(G(rng), G(rng)) * (trial % 3 == 0 ? 10.0 : 0.3));
        EXPECT_GE(direct_deficit(f, P, p), o.bound - 1e-12);
    }
}

TEST(Witness, HalfCircle) {
    ArcSet K = ArcSet::from_arcs({{kPi / 2, 3 * kPi / 2}});
    auto w = smooth_noncyclic_witness(K, 0.5, 1 << 12);
    EXPECT_GE(w.f.tail_exp, 2.5);
    EXPECT_EQ(w.Z.measure(), K.measure());
    for (int i = 0; i < 200; ++i) {
        const double t = kTwoPi * (i + 0.5) / 200.0;
        const double v = witness_at(w, t);
        if (K.contains(t)) {
            EXPECT_EQ(v, 0.0);
        } else {
            EXPECT_GT(v, 0.0);
        }
        EXPECT_NEAR(eval(w.f.window, t).real(), v, 1e-9);
    }
    // mean: (1/2pi) * h * int (1 - s^2)^3 = (1/2pi) * (pi/2) * 32/35
    EXPECT_NEAR(w.f.window[0].real(), 0.25 * 32.0 / 35.0, 1e-14);
    // Fourier coefficient by quadrature
    const int n = 5, Mq = 1 << 14;
    Complex c{};
    for (int k = 0; k < Mq; ++k) {
        const double t = kTwoPi * k / Mq;
        c += witness_at(w, t) * std::polar(1.0, -n * t);
    }
    c /= static_cast<double>(Mq);
    EXPECT_NEAR(std::abs(w.f.window[n] - c), 0.0, 1e-10);
}

TEST(Witness, SmoothnessOrderFollowsEps) {
    ArcSet K = ArcSet::from_arcs({{0.5, 1.0}, {3.0, 4.0}});
    auto w = smooth_noncyclic_witness(K, 3.5, 256);
    EXPECT_GE(w.f.tail_exp, 2.0 + 3.5);
    for (std::int64_t n : {100, 200, 256}) EXPECT_LE(std::abs(w.f.window[n]), w.f.tail_const * std::pow(n, -w.f.tail_exp) * 2e3);
}

TEST(Witness, SmallGapsAbsorbed) {
    ArcSet K = ArcSet::from_arcs({{1.0, 1.2}, {1.2005, 1.4}, {5.0, 5.5}});
    auto w = smooth_noncyclic_witness(K, 0.5, 1024, 1e-3);
    EXPECT_EQ(w.gaps.size(), 2u);
    EXPECT_TRUE(w.Z.contains(1.2002));
    EXPECT_EQ(K.intersect(w.Z.complement()).measure(), 0.0);
}

TEST(Witness, WrapAroundGap) {
    ArcSet K = ArcSet::from_arcs({{1.0, 5.0}});
    auto w = smooth_noncyclic_witness(K, 0.5, 1024);
    ASSERT_EQ(w.gaps.size(), 1u);
    EXPECT_GT(witness_at(w, 0.0), 0.0);
    const double h = 0.5 * (kTwoPi - 4.0), s = (kTwoPi - (5.0 + h)) / h;
    EXPECT_NEAR(witness_at(w, 0.0), std::pow(1.0 - s * s, 3), 1e-14);
    EXPECT_NEAR(eval(w.f.window, 0.2).real(), witness_at(w, 0.2), 1e-9);
}

TEST(Witness, WrapGapKeepsEndpointsExact) {
    ArcSet K = ArcSet::from_arcs({{0.4, 0.9}, {2.0, 2.6}, {4.1, 4.3}, {5.0, 5.8}});
    auto w = smooth_noncyclic_witness(K, 0.5, 256);
    EXPECT_EQ(K.intersect(w.Z.complement()).measure(), 0.0);
    EXPECT_EQ(w.Z.measure(), K.measure());
}

TEST(Witness, ObstructionFromBumpOnK) {
    // S = smooth bump on K (supported in K), f = witness vanishing on K.
    ArcSet K = ArcSet::from_arcs({{1.0, 2.0}, {4.0, 4.5}});
    auto S = smooth_noncyclic_witness(K.complement(), 0.5, 1 << 12).f;
    auto rep = smooth_noncyclic_witness(K, S, 0.0, 4.0 / 3.0, 0.5, {0, 4, 16}, 1 << 12);
    ASSERT_EQ(rep.ladder.size(), 3u);
    for (const auto& o : rep.ladder) {
        EXPECT_TRUE(o.structural_zero);
        EXPECT_GT(o.bound, 0.0);
        EXPECT_LT(o.residual_numeric, 1e-8);
        EXPECT_EQ(o.bound, rep.ladder[0].bound);
    }
    auto def = multiplier_deficit(rep.witness.f, 4.0 / 3.0, 4);
    EXPECT_GE(def.interval.hi, rep.ladder[0].bound);
    EXPECT_THROW(smooth_noncyclic_witness(K, S, 1e-3, 4.0 / 3.0, 0.5, {0}), PreconditionError);
}
