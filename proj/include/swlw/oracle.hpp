#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "swlw/dynamics.hpp"
#include "swlw/errors.hpp"
#include "swlw/grid.hpp"

namespace swlw {

/// 2c = 1 + sqrt(1 + (alpha/3)(1 + 6 alpha)).
inline double wave_speed(double alpha) {
    const double radicand = 1.0 + alpha / 3.0 * (1.0 + 6.0 * alpha);
    if (!(radicand >= 0.0)) {
        throw InvalidParameter("wave speed radicand is negative for alpha = " + std::to_string(alpha));
    }
    return 0.5 * (1.0 + std::sqrt(radicand));
}

/// Exact solitary-wave solution of
///   i u_t + u_xx = alpha v u - |u|^2 u,   v_t + v_xxx + v v_x = (alpha/2) (|u|^2)_x
///
///   u = e^{i omega t} e^{i x c/2} phi(y),  v = psi(y),  y = x - x0 - c t
///   phi(y) = sqrt(2 c* (1 + 6 alpha)) / cosh(sqrt(c*) y)
///   psi(y) = 12 c* / cosh^2(sqrt(c*) y),   c* = c^2/4 + omega^2
///
/// The closed form solves the system only for omega = 0; other omegas are
/// accepted and flagged by initial_state.
///
/// `origin` is the physical coordinate of grid node 0, so a grid on (0, L)
/// represents the physical window [origin, origin + L].
struct TravelingWave {
    double alpha;
    double omega;
    double c;
    double c_star;
    double x0;
    double origin;

    static TravelingWave make(double alpha, double omega, double x0 = 0.0, double origin = 0.0) {
        if (!(alpha >= -1.0 / 6.0 && alpha <= 0.0)) {
            throw InvalidParameter("traveling wave needs alpha in [-1/6, 0], got " + std::to_string(alpha));
        }
        if (!std::isfinite(omega) || !std::isfinite(x0) || !std::isfinite(origin)) {
            throw InvalidParameter("traveling wave parameters must be finite");
        }
        const double c = wave_speed(alpha);
        const double c_star = 0.25 * c * c + omega * omega;
        if (!(c_star > 0.0)) throw InvalidParameter("traveling wave shape parameter c* must be positive");
        return {alpha, omega, c, c_star, x0, origin};
    }

    double amplitude_u() const { return std::sqrt(2.0 * c_star * (1.0 + 6.0 * alpha)); }
    double amplitude_v() const { return 12.0 * c_star; }
    double decay_rate() const { return std::sqrt(c_star); }

    /// Coefficients of the system this wave solves: beta = -1, gamma = alpha/2, lambda = 1/2.
    ModelParams model() const {
        ModelParams p;
        p.alpha = alpha;
        p.beta = -1.0;
        p.gamma = 0.5 * alpha;
        p.lambda = 0.5;
        return p;
    }
};

struct WaveSample {
    complex u;
    double v;
};

/// Exact fields at physical position x and time t.
inline WaveSample evaluate(const TravelingWave& w, double x, double t) {
    const double y = (x - w.x0) - w.c * t;
    const double sech = 1.0 / std::cosh(w.decay_rate() * y);
    const complex phase = std::polar(1.0, w.omega * t + 0.5 * w.c * x);
    return {phase * (w.amplitude_u() * sech), w.amplitude_v() * sech * sech};
}

/// Exact time derivatives at (x, t).
inline WaveSample evaluate_time_derivative(const TravelingWave& w, double x, double t) {
    const double k = w.decay_rate();
    const double y = (x - w.x0) - w.c * t;
    const double sech = 1.0 / std::cosh(k * y);
    const double tanh = std::tanh(k * y);
    const double phi = w.amplitude_u() * sech;
    const double dphi = -w.amplitude_u() * k * sech * tanh;
    const double dpsi = -2.0 * w.amplitude_v() * k * sech * sech * tanh;
    const complex phase = std::polar(1.0, w.omega * t + 0.5 * w.c * x);
    return {phase * (complex(0.0, w.omega) * phi - w.c * dphi), -w.c * dpsi};
}

/// Exact state sampled on the grid at time t.
inline State sample_wave(const TravelingWave& w, const Grid& grid, double t) {
    auto u = sample([&](double x) { return evaluate(w, w.origin + x, t).u; }, grid);
    auto v = sample([&](double x) { return evaluate(w, w.origin + x, t).v; }, grid);
    return State(t, std::move(u), std::move(v));
}

inline constexpr double boundary_decay_threshold = 1e-12;

struct InitialData {
    State state;
    std::vector<std::string> warnings;
};

/// Samples the wave at t = 0 and reports anything that makes it less than
/// exact on the truncated domain.
inline InitialData initial_state(const TravelingWave& w, const Grid& grid) {
    InitialData out{sample_wave(w, grid, 0.0), {}};
    for (const double x : {w.origin, w.origin + grid.L()}) {
        const auto s = evaluate(w, x, 0.0);
        if (std::abs(s.u) >= boundary_decay_threshold || std::abs(s.v) >= boundary_decay_threshold) {
            std::ostringstream msg;
            msg << "wave has not decayed at x = " << x << " (|u| = " << std::abs(s.u) << ", v = " << s.v
                << ", threshold " << boundary_decay_threshold << ")";
            out.warnings.push_back(msg.str());
        }
    }
    if (w.omega != 0.0) {
        out.warnings.push_back("omega != 0: the closed form is not an exact solution");
    }
    return out;
}

struct RelativeError {
    double err_u;
    double err_v;
};

/// Discrete relative L2 error of each field against the exact wave at state.t.
inline RelativeError relative_l2_error(const State& s, const TravelingWave& w) {
    const State exact = sample_wave(w, s.grid(), s.t);
    const double nu = norm_p(exact.u, 2.0);
    const double nv = norm_p(exact.v, 2.0);
    if (!(nu > 0.0) || !(nv > 0.0)) {
        throw InputError("exact solution has zero norm on the grid; relative error undefined");
    }
    return {norm_p(s.u - exact.u, 2.0) / nu, norm_p(s.v - exact.v, 2.0) / nv};
}

}  // namespace swlw
