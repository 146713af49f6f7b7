#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wiener {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy. The CLI maps these onto exit codes.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ResourceError : std::runtime_error {
    std::string budget;
    ResourceError(const std::string& what, std::string budget_name)
        : std::runtime_error(what), budget(std::move(budget_name)) {}
};

struct CertificateError : std::runtime_error {
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    CertificateError(std::string ineq, double l, double r)
        : std::runtime_error(ineq + " violated: lhs=" + std::to_string(l) + " rhs=" + std::to_string(r)),
          inequality(std::move(ineq)), lhs(l), rhs(r) {}
};

struct SchemaError : std::runtime_error {
    std::string path;
    SchemaError(std::string field_path, const std::string& msg)
        : std::runtime_error(field_path + ": " + msg), path(std::move(field_path)) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw PreconditionError(msg);
}

// Closed interval of reals.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    static Interval point(double x) { return {x, x}; }

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

// Global resource budgets, adjustable by the CLI.
struct Budget {
    std::int64_t max_coeffs = std::int64_t{1} << 26;
    std::int64_t max_grid = std::int64_t{1} << 25;
    std::int64_t max_solver_dim = 20000;
};

inline Budget& budget() {
    static Budget b;
    return b;
}

inline void check_coeff_budget(std::int64_t count, const std::string& what) {
    if (count > budget().max_coeffs)
        throw ResourceError(what + " needs " + std::to_string(count) + " coefficients, budget max_coeffs=" +
                                std::to_string(budget().max_coeffs),
                            "max_coeffs");
}

inline void check_grid_budget(std::int64_t size, const std::string& what) {
    if (size > budget().max_grid)
        throw ResourceError(what + " needs a grid of " + std::to_string(size) + " points, budget max_grid=" +
                                std::to_string(budget().max_grid),
                            "max_grid");
}

inline unsigned worker_threads() {
    if (const char* env = std::getenv("WORKER_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return 1;
}

inline std::uint64_t master_seed(std::uint64_t fallback = 20240601ULL) {
    if (const char* env = std::getenv("MASTER_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env) return v;
    }
    return fallback;
}

// Deterministic splitmix64 used to derive per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Static block partition of [0, n); each index is handled by exactly one worker,
// so results written by index are independent of the thread count.
template <class F>
void parallel_for(std::int64_t n, F&& body) {
    unsigned threads = worker_threads();
    if (threads <= 1 || n < 2 * static_cast<std::int64_t>(threads)) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::int64_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        std::int64_t lo = w * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline std::int64_t next_pow2(std::int64_t n) {
    std::int64_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline double wrap_2pi(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0) r += kTwoPi;
    return r;
}

}  // namespace wiener
