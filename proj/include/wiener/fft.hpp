#pragma once

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "core.hpp"

namespace wiener::fft {

inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Unnormalized in-place DFT. sign = -1: X_k = sum x_j e^{-2 pi i jk/n}; sign = +1 the conjugate kernel.
inline void transform(std::vector<Complex>& a, int sign) {
    const int n = static_cast<int>(a.size());
    if (n <= 1) return;
    auto* data = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, data, data, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

// Full linear convolution, length a.size() + b.size() - 1.
inline std::vector<Complex> convolve(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t small = std::min(a.size(), b.size());
    if (small <= 32 || out_len < 256) {
        std::vector<Complex> out(out_len);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == Complex{}) continue;
            for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
        }
        return out;
    }
    auto L = static_cast<std::size_t>(next_pow2(static_cast<std::int64_t>(out_len)));
    check_grid_budget(static_cast<std::int64_t>(L), "FFT convolution");
    std::vector<Complex> fa(L), fb(L);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    transform(fa, -1);
    transform(fb, -1);
    for (std::size_t i = 0; i < L; ++i) fa[i] *= fb[i];
    transform(fa, +1);
    const double inv = 1.0 / static_cast<double>(L);
    std::vector<Complex> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i] * inv;
    return out;
}

// Conservative per-entry roundoff bound for an FFT convolution of length L.
inline double convolution_error_bound(double l1_a, double l1_b, std::size_t L) {
    double lg = std::log2(static_cast<double>(std::max<std::size_t>(L, 2)));
    return 8.0 * std::numeric_limits<double>::epsilon() * (lg + 1.0) * l1_a * l1_b;
}

}  // namespace wiener::fft
