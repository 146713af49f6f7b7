#include <gtest/gtest.h>

#include "wiener/kahane.hpp"

using namespace wiener;

TEST(Kahane, WorkedExample) {
    auto r = build_rho(Rational(1, 4), Rational(1, 3), 0.5);
    EXPECT_EQ(r.n, 2);
    ASSERT_EQ(r.rho.size(), 2u);
    EXPECT_EQ(r.rho.positions[0], Rational(13, 48));
    EXPECT_EQ(r.rho.positions[1], Rational(15, 48));
    EXPECT_EQ(r.rho.masses[0], Rational(15, 2));
    EXPECT_EQ(r.rho.masses[1], Rational(-13, 2));
    EXPECT_EQ(r.tv, Rational(14));
    EXPECT_NEAR(r.tv_bound, 8 * std::exp(1.0), 1e-12);
    EXPECT_TRUE(r.tv_within_bound);
}

TEST(Kahane, MomentsOfWorkedExample) {
    auto r = build_rho(Rational(1, 4), Rational(1, 3), 0.5);
    EXPECT_EQ(moment(r.rho, 0), Rational(1));
    EXPECT_EQ(moment(r.rho, 1), Rational(0));
    EXPECT_EQ(moment(r.rho, 2), Rational(-65, 768));
    EXPECT_LT(rational_abs(moment(r.rho, 2)), Rational(4, 9));
}

TEST(Kahane, PointMass) {
    RationalMeasure m{{Rational(1, 2)}, {Rational(1)}};
    for (unsigned k = 0; k < 10; ++k) EXPECT_EQ(moment(m, k), Rational(1, 1u << k));
    RealMeasure d{{0.5}, {1.0}};
    EXPECT_DOUBLE_EQ(moment(d, 3), 0.125);
}

TEST(Kahane, SmallDeltaSweep) {
    const Rational a(1, 4), b(1, 3);
    auto r = build_rho(a, b, 0.01);
    EXPECT_EQ(r.n, kahane_atom_count(b, 0.01));
    auto ms = moments(r.rho, 200);
    EXPECT_EQ(ms[0], Rational(1));
    for (unsigned k = 1; k < static_cast<unsigned>(r.n); ++k) EXPECT_EQ(ms[k], Rational(0)) << k;
    for (unsigned k = 1; k <= 200; ++k) EXPECT_LT(rational_abs(ms[k]), Rational(1, 100)) << k;
    EXPECT_TRUE(r.tv_within_bound);
}

// Oracle for the moment bound: |int s^k d rho| <= (2b)^k ||rho|| for every k >= n.
TEST(Kahane, MomentBoundProperty) {
    for (auto [p, q, delta] : {std::tuple{1, 5, 0.1}, std::tuple{1, 4, 0.05}, std::tuple{3, 10, 0.2}}) {
        const Rational a(p, q * 2), b(p, q);
        auto r = build_rho(a, b, delta);
        auto ms = moments(r.rho, static_cast<unsigned>(r.n) + 30);
        for (unsigned k = static_cast<unsigned>(r.n); k < ms.size(); ++k) {
            EXPECT_LE(rational_abs(ms[k]), r.tv * rational_pow(2 * b, k));
            EXPECT_LT(to_double(rational_abs(ms[k])), delta * r.tv_bound);
        }
        EXPECT_LE(to_double(r.tv), r.tv_bound * (1 + 1e-12));
    }
}

// Independent oracle: solve sum_j m_j s_j^k = [k == 0], k < n, by exact Gaussian elimination.
TEST(Kahane, MassesAgreeWithVandermondeSolve) {
    auto r = build_rho(Rational(1, 5), Rational(2, 5), 0.1);
    const auto n = static_cast<std::size_t>(r.n);
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n + 1));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) A[k][j] = rational_pow(r.rho.positions[j], static_cast<unsigned>(k));
        A[k][n] = k == 0 ? 1 : 0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (A[piv][c] == 0) ++piv;
        std::swap(A[c], A[piv]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || A[i][c] == 0) continue;
            const Rational f = A[i][c] / A[c][c];
            for (std::size_t j = c; j <= n; ++j) A[i][j] -= f * A[c][j];
        }
    }
    for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(A[j][n] / A[j][j], r.rho.masses[j]) << j;
}

TEST(Kahane, ConstantExponent) {
    auto r = build_rho(Rational(1, 4), Rational(1, 3), 0.5);
    const double expected = std::log(2 * std::exp(1.0) * (1.0 / 3) / (1.0 / 12)) / std::log(1.5);
    EXPECT_NEAR(r.c_I, expected, 1e-12);
    EXPECT_NEAR(r.delta_power, std::pow(0.5, -expected), 1e-9);
}

TEST(Kahane, Preconditions) {
    EXPECT_THROW(build_rho(Rational(1, 3), Rational(1, 4), 0.5), PreconditionError);
    EXPECT_THROW(build_rho(Rational(1, 4), Rational(1, 2), 0.5), PreconditionError);
    EXPECT_THROW(build_rho(Rational(0), Rational(1, 3), 0.5), PreconditionError);
    EXPECT_THROW(build_rho(Rational(1, 4), Rational(1, 3), 1.0), PreconditionError);
}
