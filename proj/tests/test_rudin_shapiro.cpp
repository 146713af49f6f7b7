#include <gtest/gtest.h>

#include "wiener/rudin_shapiro.hpp"

using namespace wiener;

namespace {

// Sup of |Q| by brute force on a very fine grid; a lower bound on the true sup.
double dense_sup(const Poly& Q, int points) {
    double m = 0.0;
    for (int i = 0; i < points; ++i) m = std::max(m, std::abs(eval(Q, kTwoPi * i / points)));
    return m;
}

}  // namespace

TEST(RudinShapiro, SignsOfSmallIndices) {
    EXPECT_EQ(rudin_shapiro_sign(0), 1);
    EXPECT_EQ(rudin_shapiro_sign(1), 1);
    EXPECT_EQ(rudin_shapiro_sign(2), 1);
    EXPECT_EQ(rudin_shapiro_sign(3), -1);
    EXPECT_EQ(rudin_shapiro_sign(6), -1);
    EXPECT_EQ(rudin_shapiro_sign(7), 1);  // two overlapping pairs
}

TEST(BuildQ, DegreeZero) {
    auto r = build_Q(0);
    ASSERT_EQ(r.signs.size(), 1u);
    EXPECT_TRUE(r.cert.certified);
    EXPECT_NEAR(dense_sup(r.Q, 4096), 1.0, 1e-12);
    EXPECT_LE(r.cert.bound, std::sqrt(2.0) * (1 + 1e-9));
}

TEST(BuildQ, DegreeOneBoundary) {
    auto r = build_Q(1);
    EXPECT_TRUE(r.cert.certified);
    EXPECT_EQ(r.signs, (std::vector<int>{1, 1}));
    EXPECT_NEAR(std::abs(eval(r.Q, 0.0)), 2.0, 1e-12);
    EXPECT_LE(r.cert.bound, 2.0 * (1 + 1e-9));
}

TEST(BuildQ, DegreeThreeCertified) {
    auto r = build_Q(3);
    EXPECT_TRUE(r.cert.certified);
    EXPECT_EQ(r.signs.size(), 8u);
    EXPECT_LE(r.cert.bound, 4.0 * (1 + 1e-9));
    EXPECT_LE(dense_sup(r.Q, 1 << 16), 4.0 + 1e-12);
}

TEST(BuildQ, UnshiftedRuleIsRejectedAtThree) {
    std::vector<int> s(8);
    for (int n = 1; n <= 8; ++n) s[static_cast<std::size_t>(n - 1)] = rudin_shapiro_sign(static_cast<std::uint64_t>(n));
    EXPECT_GT(dense_sup(cosine_series(s), 1 << 16), 4.0);
    auto r = build_Q(3);
    EXPECT_EQ(r.cert.rule, SignRule::binary_pairs_shifted);
}

TEST(BuildQ, ExhaustiveFallback) {
    RudinShapiroOptions o;
    o.force_exhaustive = true;
    for (int k = 0; k <= 3; ++k) {
        auto r = build_Q(k, o);
        EXPECT_TRUE(r.cert.certified);
        EXPECT_EQ(r.cert.rule, SignRule::exhaustive);
        EXPECT_LE(dense_sup(r.Q, 1 << 14), std::pow(2.0, 0.5 * (k + 1)) + 1e-9);
    }
}

// Oracle for the complementary pair: with R_k built alongside, |P|^2 + |R|^2 = 2^{k+1} pointwise.
TEST(BuildQ, GolayIdentityPointwise) {
    std::vector<int> P{1}, R{1};
    for (int k = 1; k <= 10; ++k) {
        std::vector<int> P2(P), R2(P);
        for (int v : R) {
            P2.push_back(v);
            R2.push_back(-v);
        }
        P.swap(P2);
        R.swap(R2);
        EXPECT_EQ(detail::golay_first(k), P);
        for (double t : {0.1, 1.3, 2.9, 4.4}) {
            Complex a{}, b{};
            for (std::size_t n = 0; n < P.size(); ++n) {
                a += double(P[n]) * std::polar(1.0, double(n) * t);
                b += double(R[n]) * std::polar(1.0, double(n) * t);
            }
            EXPECT_NEAR(std::norm(a) + std::norm(b), std::pow(2.0, k + 1), 1e-9);
        }
    }
}

TEST(BuildQ, LargeDegreeUsesRecursion) {
    auto r = build_Q(16);
    EXPECT_TRUE(r.cert.certified);
    EXPECT_EQ(r.cert.method, "golay_recursion");
    EXPECT_LE(r.cert.grid_lower, r.cert.target * (1 + 1e-9));
}

TEST(BuildPhi, QuarticExample) {
    auto r = build_phi(4.0, 0.5);
    EXPECT_EQ(r.k, 1);
    EXPECT_NEAR(r.phi[1].real(), 0.25, 1e-15);
    EXPECT_NEAR(r.phi[2].real(), 0.25, 1e-15);
    EXPECT_NEAR(r.aq, std::pow(2.0, -1.5), 1e-12);
    EXPECT_NEAR(r.l2, 0.5, 1e-12);
    EXPECT_LE(r.sup_bound, 1.0 + 1e-9);
}

TEST(BuildPhi, DegreeIndexFromClosedForm) {
    EXPECT_EQ(phi_degree_index(2.5, 0.1), 23);
    EXPECT_EQ(phi_degree_index(4.0, 0.5), 1);
}

TEST(BuildPhi, PropertiesAcrossParameters) {
    for (double q : {2.5, 3.0, 4.0, 6.0})
        for (double g : {0.2, 0.35, 0.5}) {
            auto r = build_phi(q, g);
            EXPECT_GE(r.k, 1);
            EXPECT_NEAR(r.l2, 0.5, 1e-12);
            EXPECT_NEAR(r.phi[0].real(), 0.0, 0.0);
            EXPECT_LT(r.aq, g);
            EXPECT_NEAR(r.aq, r.aq_closed, 1e-9 * r.aq_closed);
            EXPECT_LE(r.sup_bound, 1.0 + 1e-9);
            EXPECT_TRUE(r.phi.is_real(0.0));
        }
}

TEST(BuildPhi, OverBudgetNamesDegree) {
    const auto saved = budget();
    budget().max_coeffs = std::int64_t{1} << 20;
    struct Restore {
        Budget b;
        ~Restore() { budget() = b; }
    } restore{saved};
    try {
        build_phi(2.5, 0.1);
        FAIL() << "expected resource error";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("k=23"), std::string::npos);
    }
}

TEST(BuildPhi, PreconditionOnQ) {
    EXPECT_THROW(build_phi(2.0, 0.5), PreconditionError);
    EXPECT_THROW(build_phi(3.0, 0.0), PreconditionError);
}
