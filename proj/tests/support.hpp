#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "swlw/swlw.hpp"

namespace swlw::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20261019);
    return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline RealGridFn random_real(const Grid& g, double amp = 1.0) {
    RealGridFn z(g);
    z.update([&](std::span<double> v) {
        for (auto& x : v) x = uniform(-amp, amp);
    });
    return z;
}

inline ComplexGridFn random_complex(const Grid& g, double amp = 1.0) {
    ComplexGridFn z(g);
    z.update([&](std::span<complex> v) {
        for (auto& x : v) x = complex(uniform(-amp, amp), uniform(-amp, amp));
    });
    return z;
}

// Smooth random state: a few low Fourier modes with compact support inside
// the active range.
inline State smooth_state(const Grid& g, double amp_u = 0.5, double amp_v = 1.0) {
    const double L = g.L();
    const double k1 = uniform(1.0, 3.0);
    const double k2 = uniform(1.0, 3.0);
    const double ph = uniform(0.0, 6.28);
    auto bump = [L](double x) {
        const double s = std::sin(3.14159265358979 * x / L);
        return s * s * s * s;
    };
    auto u = sample([&](double x) { return amp_u * bump(x) * std::polar(1.0, k1 * 6.28318530717959 * x / L + ph); }, g);
    auto v = sample([&](double x) { return amp_v * bump(x) * std::cos(k2 * 6.28318530717959 * x / L); }, g);
    return State(0.0, std::move(u), std::move(v));
}

// Benchmark problem: domain [-20, 50], alpha = -1/12, omega = 0.
inline constexpr double benchmark_alpha = -1.0 / 12.0;
inline constexpr double benchmark_origin = -20.0;
inline constexpr double benchmark_L = 70.0;

inline TravelingWave benchmark_wave(double x0 = 0.0) {
    return TravelingWave::make(benchmark_alpha, 0.0, x0, benchmark_origin);
}

}  // namespace swlw::testing
