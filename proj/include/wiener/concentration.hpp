#pragma once

#include <bit>
#include <optional>
#include <random>
#include <vector>

#include "core.hpp"

namespace wiener {

// Finite probability space; points are indices 0..size-1.
struct DiscreteProbSpace {
    std::vector<double> weights;

    explicit DiscreteProbSpace(std::vector<double> w) : weights(std::move(w)) {
        double s = 0.0;
        for (double x : weights) {
            require(x >= 0.0, "probability weights must be nonnegative");
            s += x;
        }
        require(std::fabs(s - 1.0) <= 1e-12, "probability weights must sum to 1");
    }
    std::size_t size() const { return weights.size(); }
};

using RandomVariables = std::vector<std::vector<double>>;  // X[j][omega]

inline double bernstein_bound(int N, double alpha, double eps) {
    require(N >= 1, "bernstein_bound: N >= 1");
    return std::exp(-alpha * alpha * N / 8.0) + eps * std::exp(N / 4.0);
}

inline double expectation(const DiscreteProbSpace& P, const std::vector<double>& X) {
    double s = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) s += P.weights[i] * X[i];
    return s;
}

struct MultiplicativityReport {
    double mu = 0.0;
    double max_relative_deviation = 0.0;
    bool pass = false;
    bool exhaustive = true;
    std::int64_t subsets_checked = 0;
    std::uint64_t worst_subset = 0;
};

namespace detail {

inline void check_variables(const DiscreteProbSpace& P, const RandomVariables& X, double& mu) {
    require(!X.empty(), "need at least one random variable");
    for (const auto& x : X) {
        require(x.size() == P.size(), "random variable length must match the space");
        for (double v : x) require(std::fabs(v) <= 1.0 + 1e-12, "random variables must satisfy |X_j| <= 1");
    }
    mu = expectation(P, X[0]);
    require(mu > 0.0, "common expectation must be positive");
    for (const auto& x : X) require(std::fabs(expectation(P, x) - mu) <= 1e-10, "expectations must be equal");
}

}  // namespace detail

// max over nonempty A of |E[prod_{j in A} X_j] / mu^{|A|} - 1|; exhaustive for N <= 20, else sampled.
inline MultiplicativityReport check_almost_multiplicative(const DiscreteProbSpace& P, const RandomVariables& X, double eps,
                                                          bool allow_sampled = false, std::int64_t samples = 100000,
                                                          std::uint64_t seed = master_seed()) {
    MultiplicativityReport r;
    detail::check_variables(P, X, r.mu);
    const auto N = static_cast<int>(X.size());
    auto ratio_dev = [&](std::uint64_t A, double e) {
        const int card = std::popcount(A);
        return std::fabs(e / std::pow(r.mu, card) - 1.0);
    };
    if (N <= 20) {
        const std::uint64_t S = std::uint64_t{1} << N;
        std::vector<double> E(S, 0.0), prod(S);
        for (std::size_t w = 0; w < P.size(); ++w) {
            if (P.weights[w] == 0.0) continue;
            prod[0] = 1.0;
            for (std::uint64_t A = 1; A < S; ++A) {
                const int j = std::countr_zero(A);
                prod[A] = prod[A & (A - 1)] * X[static_cast<std::size_t>(j)][w];
                E[A] += P.weights[w] * prod[A];
            }
        }
        for (std::uint64_t A = 1; A < S; ++A) {
            const double d = ratio_dev(A, E[A]);
            if (d > r.max_relative_deviation) {
                r.max_relative_deviation = d;
                r.worst_subset = A;
            }
        }
        r.subsets_checked = static_cast<std::int64_t>(S - 1);
    } else {
        if (!allow_sampled)
            throw ResourceError("exhaustive subset check limited to N <= 20; use sampled mode", "max_subsets");
        r.exhaustive = false;
        std::mt19937_64 rng(seed);
        for (std::int64_t s = 0; s < samples; ++s) {
            std::vector<int> members;
            while (members.empty())
                for (int j = 0; j < N; ++j)
                    if (rng() & 1u) members.push_back(j);
            double e = 0.0;
            for (std::size_t w = 0; w < P.size(); ++w) {
                double p = 1.0;
                for (int j : members) p *= X[static_cast<std::size_t>(j)][w];
                e += P.weights[w] * p;
            }
            const double d = std::fabs(e / std::pow(r.mu, static_cast<double>(members.size())) - 1.0);
            r.max_relative_deviation = std::max(r.max_relative_deviation, d);
        }
        r.subsets_checked = samples;
    }
    r.pass = r.max_relative_deviation <= eps;
    return r;
}

// P{ (1/N) sum X_j < mu - alpha }; mu defaults to the measured common expectation.
inline double tail_probability(const DiscreteProbSpace& P, const RandomVariables& X, double alpha,
                               std::optional<double> mu_exact = std::nullopt) {
    double mu = 0.0;
    detail::check_variables(P, X, mu);
    if (mu_exact) mu = *mu_exact;
    const double thr = mu - alpha;
    const double N = static_cast<double>(X.size());
    double tail = 0.0;
    for (std::size_t w = 0; w < P.size(); ++w) {
        double s = 0.0;
        for (const auto& x : X) s += x[w];
        if (s / N < thr) tail += P.weights[w];
    }
    return tail;
}

// Product space of N independent +-1 coins with P(+1) = p_plus.
inline std::pair<DiscreteProbSpace, RandomVariables> biased_coins(int N, double p_plus) {
    require(N >= 1 && N <= 24, "biased_coins: 1 <= N <= 24");
    const std::size_t S = std::size_t{1} << N;
    std::vector<double> w(S);
    RandomVariables X(static_cast<std::size_t>(N), std::vector<double>(S));
    for (std::size_t o = 0; o < S; ++o) {
        double p = 1.0;
        for (int j = 0; j < N; ++j) {
            const bool up = (o >> j) & 1u;
            X[static_cast<std::size_t>(j)][o] = up ? 1.0 : -1.0;
            p *= up ? p_plus : 1.0 - p_plus;
        }
        w[o] = p;
    }
    return {DiscreteProbSpace(std::move(w)), std::move(X)};
}

}  // namespace wiener
