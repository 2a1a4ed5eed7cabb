#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swlw/banded.hpp"
#include "swlw/dynamics.hpp"
#include "swlw/errors.hpp"
#include "swlw/grid.hpp"

namespace swlw {

struct SolverConfig {
    double tau = 1e-3;
    double T = 1.0;
    double tol = 1e-6;
    int max_iter = 50;

    void validate() const {
        if (!(tau > 0.0)) throw InvalidParameter("tau must be positive");
        if (!(T > 0.0)) throw InvalidParameter("T must be positive");
        if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
        if (max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
    }
};

namespace detail {

// h-weighted l2 norm over a vector of active unknowns.
inline double active_l2(std::span<const double> x, double h) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(h * s);
}

inline double active_l2(std::span<const complex> x, double h) {
    double s = 0.0;
    for (const complex& xi : x) s += std::norm(xi);
    return std::sqrt(h * s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schrodinger half: Crank-Nicolson with a frozen-modulus fixed point.
// ---------------------------------------------------------------------------

struct SchrodingerUpdate {
    ComplexGridFn u;
    int iters = 0;
    std::vector<double> increments;
};

/// Solves
///   i (u' - u)/tau + Lap u_m = beta |u_m|^2 u_m + alpha g(v) u_m,  u_m = (u' + u)/2
/// by freezing |u_m|^2 at the previous iterate, so every inner solve is a
/// complex tridiagonal system. The frozen potential is real, which makes
/// each inner solve preserve ||u||_2 exactly.
inline SchrodingerUpdate schrodinger_update(const ComplexGridFn& u_n, const RealGridFn& v_n, const ModelParams& p,
                                            const SolverConfig& cfg) {
    const Grid& g = u_n.grid();
    detail::require_same_grid(g, v_n.grid());
    const int J = g.J();
    const double h = g.h();
    const std::size_t n = g.active_count();
    const complex i_over_tau(0.0, 1.0 / cfg.tau);
    const double half_inv_h2 = 0.5 / (h * h);

    std::vector<double> potential_v(n);
    for (int j = 2; j <= J - 1; ++j) potential_v[j - 2] = p.alpha * p.trunc.coupling(v_n[j]);

    SchrodingerUpdate out{u_n, 0, {}};
    std::vector<complex> rhs(n);
    Tridiag system(n);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        for (int j = 2; j <= J - 1; ++j) {
            const std::size_t i = static_cast<std::size_t>(j - 2);
            const complex mid = 0.5 * (out.u[j] + u_n[j]);
            const double w = p.beta * std::norm(mid) + potential_v[i];
            system.lower[i] = j > 2 ? complex(half_inv_h2) : complex{};
            system.upper[i] = j < J - 1 ? complex(half_inv_h2) : complex{};
            system.diag[i] = i_over_tau - 2.0 * half_inv_h2 - 0.5 * w;
            const complex lap_n = (u_n[j + 1] - 2.0 * u_n[j] + u_n[j - 1]) * (2.0 * half_inv_h2);
            rhs[i] = i_over_tau * u_n[j] - 0.5 * lap_n + 0.5 * w * u_n[j];
        }
        const auto next = solve_tridiag(system, rhs);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += std::norm(next[i] - out.u[static_cast<int>(i) + 2]);
        diff = std::sqrt(h * diff);
        out.u.update([&](std::span<complex> values) {
            for (std::size_t i = 0; i < n; ++i) values[i + 2] = next[i];
        });
        out.iters = it;
        out.increments.push_back(diff);
        if (!std::isfinite(diff)) throw BlowUp(0.0, cfg.tau);
        if (diff <= cfg.tol) return out;
    }
    throw NonConvergence(cfg.max_iter, out.increments.back(), "Schrodinger fixed-point iteration did not converge");
}

// ---------------------------------------------------------------------------
// KdV half: implicit Euler with Newton on the banded residual.
// ---------------------------------------------------------------------------

/// Residual on the active unknowns j = 2..J-1 (entry j-2):
///   (v - v_n)/tau + D3 v + lambda D0 f(v) - gamma D0 (g'(v) rho),  rho = |u_n|^2.
inline std::vector<double> kdv_residual(const RealGridFn& v, const RealGridFn& v_n, std::span<const double> rho,
                                        const ModelParams& p, double tau) {
    const Grid& g = v.grid();
    const int J = g.J();
    const double h = g.h();
    const auto d3 = d_cubed(v);
    std::vector<double> flux(g.size());
    std::vector<double> forcing(g.size());
    for (int j = 0; j <= J + 1; ++j) {
        flux[j] = p.trunc.flux(v[j]);
        forcing[j] = p.trunc.coupling_prime(v[j]) * rho[j];
    }
    const double inv_2h = 1.0 / (2.0 * h);
    std::vector<double> r(g.active_count());
    for (int j = 2; j <= J - 1; ++j) {
        r[j - 2] = (v[j] - v_n[j]) / tau + d3[j] + p.lambda * (flux[j + 1] - flux[j - 1]) * inv_2h -
                   p.gamma * (forcing[j + 1] - forcing[j - 1]) * inv_2h;
    }
    return r;
}

/// Analytic Jacobian of kdv_residual with respect to the active unknowns:
///   I/tau + D3 + lambda D0 diag(f'(v)) - gamma D0 diag(g''(v) rho).
inline Pentadiag kdv_jacobian(const RealGridFn& v, std::span<const double> rho, const ModelParams& p, double tau) {
    const Grid& g = v.grid();
    const int J = g.J();
    const double h = g.h();
    const double c1 = 1.0 / (h * h * h);
    const double c2 = 0.5 * c1;
    const double inv_2h = 1.0 / (2.0 * h);
    auto column_weight = [&](int k) {
        return (p.lambda * p.trunc.flux_prime(v[k]) - p.gamma * p.trunc.coupling_second(v[k]) * rho[k]) * inv_2h;
    };

    const std::size_t n = g.active_count();
    Pentadiag jac(n);
    for (int j = 2; j <= J - 1; ++j) {
        const auto i = static_cast<std::size_t>(j - 2);
        jac.at(i, i) = 1.0 / tau;
        if (j + 1 <= J - 1) jac.at(i, i + 1) = -c1 + column_weight(j + 1);
        if (j - 1 >= 2) jac.at(i, i - 1) = c1 - column_weight(j - 1);
        if (j + 2 <= J - 1) jac.at(i, i + 2) = c2;
        if (j - 2 >= 2) jac.at(i, i - 2) = -c2;
    }
    return jac;
}

struct KdvUpdate {
    RealGridFn v;
    int iters = 0;
    std::vector<double> increments;
    // Residual norm at the start of each Newton iteration.
    std::vector<double> residuals;
};

inline KdvUpdate kdv_update(const RealGridFn& v_n, const ComplexGridFn& u_n, const ModelParams& p,
                            const SolverConfig& cfg) {
    const Grid& g = v_n.grid();
    detail::require_same_grid(g, u_n.grid());
    const int J = g.J();
    const double h = g.h();
    std::vector<double> rho(g.size());
    for (int j = 0; j <= J + 1; ++j) rho[j] = std::norm(u_n[j]);

    KdvUpdate out{v_n, 0, {}, {}};
    for (int it = 1; it <= cfg.max_iter; ++it) {
        auto r = kdv_residual(out.v, v_n, rho, p, cfg.tau);
        out.residuals.push_back(detail::active_l2(r, h));
        for (double& ri : r) ri = -ri;
        const auto delta = solve_penta(lu_penta(kdv_jacobian(out.v, rho, p, cfg.tau)), r);
        out.v.update([&](std::span<double> values) {
            for (std::size_t i = 0; i < delta.size(); ++i) values[i + 2] += delta[i];
        });
        const double inc = detail::active_l2(delta, h);
        out.iters = it;
        out.increments.push_back(inc);
        if (!std::isfinite(inc)) throw BlowUp(0.0, cfg.tau);
        if (inc <= cfg.tol) return out;
    }
    throw NonConvergence(cfg.max_iter, out.increments.back(), "KdV Newton iteration did not converge");
}

// ---------------------------------------------------------------------------
// Time stepping.
// ---------------------------------------------------------------------------

struct StepOutcome {
    State state;
    int iters_u;
    int iters_v;
};

/// One step of the fully discrete scheme. Both halves read the old state's
/// coupling fields: v^n in the Schrodinger potential, |u^n|^2 in the KdV forcing.
inline StepOutcome step_with_stats(const State& s, const ModelParams& p, const SolverConfig& cfg) {
    auto su = schrodinger_update(s.u, s.v, p, cfg);
    auto kv = kdv_update(s.v, s.u, p, cfg);
    return {State(s.t + cfg.tau, std::move(su.u), std::move(kv.v)), su.iters, kv.iters};
}

inline State step(const State& s, const ModelParams& p, const SolverConfig& cfg) {
    return step_with_stats(s, p, cfg).state;
}

/// Steps to the first time >= T, sampling diagnostics every `sample_every`
/// steps plus the initial and final states. `on_sample` sees each sampled state.
inline RunResult run(const State& initial, const ModelParams& p, const SolverConfig& cfg, int sample_every,
                     const SampleObserver& on_sample = {}) {
    cfg.validate();
    if (sample_every < 1) throw InvalidParameter("sample_every must be >= 1");

    RunDiagnostics diag;
    detail::record_sample(diag, initial, p, 0, 0);
    if (on_sample) on_sample(initial);
    const long steps = detail::step_count(cfg.tau, cfg.T);
    State s = initial;
    long sum_u = 0;
    long sum_v = 0;
    for (long k = 1; k <= steps; ++k) {
        StepOutcome next{s, 0, 0};
        try {
            next = step_with_stats(s, p, cfg);
        } catch (const Error& e) {
            throw RunFailure(e.what(), k, s.t, diag);
        }
        s = std::move(next.state);
        s.t = initial.t + static_cast<double>(k) * cfg.tau;
        sum_u += next.iters_u;
        sum_v += next.iters_v;
        diag.max_inner_iters_u = std::max(diag.max_inner_iters_u, next.iters_u);
        diag.max_inner_iters_v = std::max(diag.max_inner_iters_v, next.iters_v);
        diag.mean_inner_iters_u = static_cast<double>(sum_u) / static_cast<double>(k);
        diag.mean_inner_iters_v = static_cast<double>(sum_v) / static_cast<double>(k);
        if (!is_finite(s)) throw RunFailure(BlowUp(s.t, cfg.tau).what(), k, s.t, diag);
        if (k % sample_every == 0 || k == steps) {
            detail::record_sample(diag, s, p, next.iters_u, next.iters_v);
            if (on_sample) on_sample(s);
        }
    }
    return {std::move(s), std::move(diag)};
}

}  // namespace swlw
