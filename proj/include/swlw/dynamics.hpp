#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "swlw/errors.hpp"
#include "swlw/grid.hpp"
#include "swlw/truncation.hpp"

namespace swlw {

/// Coefficients of
///   i u_t + u_xx = beta |u|^2 u + alpha g(v) u
///   v_t + v_xxx + lambda (f(v))_x = gamma (g'(v) |u|^2)_x
/// with (f, g) from `trunc`. lambda = 1 is the original system, lambda = 1/2
/// with beta = -1, gamma = alpha/2 is the system with traveling-wave solutions.
struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double lambda = 1.0;
    TruncationFamily trunc = TruncationFamily::off();

    /// alpha * gamma > 0, the sign condition of the convergence theory. Only reported.
    bool hypothesis_holds() const { return alpha * gamma > 0.0; }
};

struct State {
    State(double time, ComplexGridFn short_wave, RealGridFn long_wave)
        : t(time), u(std::move(short_wave)), v(std::move(long_wave)) {
        detail::require_same_grid(u.grid(), v.grid());
    }

    /// Zero fields at t = 0.
    explicit State(const Grid& grid) : t(0.0), u(grid), v(grid) {}

    const Grid& grid() const { return u.grid(); }

    double t;
    ComplexGridFn u;
    RealGridFn v;
};

inline bool is_finite(const State& s) {
    return std::ranges::all_of(s.u.values(), [](const complex& z) { return detail::is_finite(z); }) &&
           std::ranges::all_of(s.v.values(), [](double x) { return std::isfinite(x); });
}

/// Time series of the monitored quantities. Inner-iteration counts are those
/// of the step that produced the sample (0 for the initial sample and for the
/// explicit reference integrator).
struct RunDiagnostics {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> q_invariant;
    std::vector<double> energy;
    std::vector<double> v_sup;
    std::vector<int> inner_iters_u;
    std::vector<int> inner_iters_v;

    // Over all steps, not only the sampled ones.
    int max_inner_iters_u = 0;
    int max_inner_iters_v = 0;
    double mean_inner_iters_u = 0.0;
    double mean_inner_iters_v = 0.0;

    std::size_t size() const { return times.size(); }
};

class RunFailure : public Error {
public:
    RunFailure(const std::string& what, long step, double t, RunDiagnostics partial)
        : Error(what + " [step " + std::to_string(step) + ", t = " + std::to_string(t) + "]"),
          step_(step),
          t_(t),
          partial_(std::move(partial)) {}

    long step() const { return step_; }
    double t() const { return t_; }
    const RunDiagnostics& diagnostics() const { return partial_; }

private:
    long step_;
    double t_;
    RunDiagnostics partial_;
};

// ---------------------------------------------------------------------------
// Conserved and monitored quantities.
// ---------------------------------------------------------------------------

/// ||u||_2, conserved by the semi-discrete flow.
inline double mass(const State& s) { return norm_p(s.u, 2.0); }

/// alpha ||v||_2^2 + 2 gamma Im sum_j h u_j conj(D0 u)_j.
inline double q_invariant(const State& s, const ModelParams& p) {
    const double vv = norm_p(s.v, 2.0);
    const complex cross = inner(s.u.nodes(), d_zero(s.u));
    return p.alpha * vv * vv + 2.0 * p.gamma * cross.imag();
}

/// Discrete energy
///   gamma ||D+u||^2 + alpha/2 ||D+v||^2 + beta gamma/2 ||u||_4^4
///   + alpha gamma sum h g(v_j)|u_j|^2 - alpha lambda sum h F(v_j)
/// with the potential sums over j = 1..J. The lambda factor makes the
/// functional conserved for any flux weight; at lambda = 1 it is the
/// classical form.
inline double energy(const State& s, const ModelParams& p) {
    const Grid& g = s.grid();
    const double h = g.h();
    const double du = d_plus_norm(s.u, 2.0);
    const double dv = d_plus_norm(s.v, 2.0);
    const double u4 = norm_p(s.u, 4.0);
    double coupling = 0.0;
    double potential = 0.0;
    for (int j = 1; j <= g.J(); ++j) {
        coupling += p.trunc.coupling(s.v[j]) * std::norm(s.u[j]);
        potential += p.trunc.flux_potential(s.v[j]);
    }
    return p.gamma * du * du + 0.5 * p.alpha * dv * dv + 0.5 * p.beta * p.gamma * u4 * u4 * u4 * u4 +
           p.alpha * p.gamma * h * coupling - p.alpha * p.lambda * h * potential;
}

/// Bounds on the initial data that do not depend on the truncation level.
struct AprioriQuantities {
    double E0;
    double M0;
    double Q0;
};

inline AprioriQuantities apriori_quantities(const ComplexGridFn& u0, const RealGridFn& v0, const ModelParams& p) {
    const State s(0.0, u0, v0);
    const double a = std::abs(p.alpha);
    const double du = d_plus_norm(u0, 2.0);
    const double dv = d_plus_norm(v0, 2.0);
    const double u4 = norm_p(u0, 4.0);
    const double v3 = norm_p(v0, 3.0);
    const double E0 = std::abs(p.gamma) * du * du + 0.5 * a * dv * dv +
                      std::abs(p.alpha * p.gamma) * norm_p(v0, 2.0) * u4 * u4 + a / 3.0 * v3 * v3 * v3 +
                      0.5 * std::abs(p.beta * p.gamma) * u4 * u4 * u4 * u4;
    return {E0, mass(s), q_invariant(s, p)};
}

namespace detail {

inline void record_sample(RunDiagnostics& d, const State& s, const ModelParams& p, int iters_u, int iters_v) {
    d.times.push_back(s.t);
    d.mass.push_back(mass(s));
    d.q_invariant.push_back(q_invariant(s, p));
    d.energy.push_back(energy(s, p));
    d.v_sup.push_back(norm_p(s.v, infinity_norm));
    d.inner_iters_u.push_back(iters_u);
    d.inner_iters_v.push_back(iters_v);
}

// Number of steps of size dt needed to first reach t >= T.
inline long step_count(double dt, double T) {
    return static_cast<long>(std::ceil(T / dt - 1e-9));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Semi-discrete system and its reference integrator.
// ---------------------------------------------------------------------------

struct TimeDerivative {
    ComplexGridFn du;
    RealGridFn dv;
};

/// Right-hand side of the method-of-lines system on X_J:
///   du/dt = i (Lap u - beta |u|^2 u - alpha g(v) u)
///   dv/dt = -D3 v - lambda D0 f(v) + gamma D0 (g'(v) |u|^2)
inline TimeDerivative rhs(const State& s, const ModelParams& p) {
    const Grid& g = s.grid();
    const int J = g.J();
    const double h = g.h();
    const auto lap = laplacian_h(s.u);
    const auto d3 = d_cubed(s.v);

    std::vector<double> flux(g.size());
    std::vector<double> forcing(g.size());
    for (int j = 0; j <= J + 1; ++j) {
        flux[j] = p.trunc.flux(s.v[j]);
        forcing[j] = p.trunc.coupling_prime(s.v[j]) * std::norm(s.u[j]);
    }

    TimeDerivative out{ComplexGridFn(g), RealGridFn(g)};
    const complex i_unit(0.0, 1.0);
    const double inv_2h = 1.0 / (2.0 * h);
    out.du.update([&](std::span<complex> du) {
        for (int j = 2; j <= J - 1; ++j) {
            const complex uj = s.u[j];
            du[j] = i_unit * (lap[j] - p.beta * std::norm(uj) * uj - p.alpha * p.trunc.coupling(s.v[j]) * uj);
        }
    });
    out.dv.update([&](std::span<double> dv) {
        for (int j = 2; j <= J - 1; ++j) {
            dv[j] = -d3[j] - p.lambda * (flux[j + 1] - flux[j - 1]) * inv_2h +
                    p.gamma * (forcing[j + 1] - forcing[j - 1]) * inv_2h;
        }
    });
    return out;
}

/// Largest RK4 step accepted for the reference integrator: 0.4 h^3 (the
/// five-point D3 has spectral radius about 2.6/h^3 and the RK4 imaginary-axis
/// limit is 2.83), capped by 0.5 h^2 for the Laplacian on very coarse meshes.
inline double rk4_dt_max(const Grid& g) {
    const double h = g.h();
    return std::min(0.4 * h * h * h, 0.5 * h * h);
}

inline State rk4_step(const State& s, const ModelParams& p, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (dt > rk4_dt_max(s.grid()) * (1.0 + 1e-12)) {
        throw InvalidParameter("RK4 step dt = " + std::to_string(dt) + " exceeds the stability budget " +
                               std::to_string(rk4_dt_max(s.grid())) + "; use a smaller dt or a coarser grid");
    }
    auto stage = [&](const TimeDerivative& k, double w) {
        State y = s;
        y.u += w * k.du;
        y.v += w * k.dv;
        return y;
    };
    const auto k1 = rhs(s, p);
    const auto k2 = rhs(stage(k1, 0.5 * dt), p);
    const auto k3 = rhs(stage(k2, 0.5 * dt), p);
    const auto k4 = rhs(stage(k3, dt), p);

    State next = s;
    next.u += (dt / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    next.v += (dt / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    next.t = s.t + dt;
    if (!is_finite(next)) throw BlowUp(next.t, dt);
    return next;
}

using SampleObserver = std::function<void(const State&)>;

struct RunResult {
    State final_state;
    RunDiagnostics diagnostics;
};

/// Integrates with RK4 until the first step time >= T, sampling every
/// `sample_every` steps plus the initial and final states.
inline RunResult integrate_semidiscrete(const State& initial, const ModelParams& p, double dt, double T,
                                        int sample_every, const SampleObserver& on_sample = {}) {
    if (!(T > 0.0)) throw InvalidParameter("horizon T must be positive");
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (sample_every < 1) throw InvalidParameter("sample_every must be >= 1");

    RunDiagnostics diag;
    detail::record_sample(diag, initial, p, 0, 0);
    if (on_sample) on_sample(initial);
    const long steps = detail::step_count(dt, T);
    State s = initial;
    for (long k = 1; k <= steps; ++k) {
        try {
            s = rk4_step(s, p, dt);
        } catch (const Error& e) {
            throw RunFailure(e.what(), k, s.t, diag);
        }
        s.t = initial.t + static_cast<double>(k) * dt;
        if (k % sample_every == 0 || k == steps) {
            detail::record_sample(diag, s, p, 0, 0);
            if (on_sample) on_sample(s);
        }
    }
    return {std::move(s), std::move(diag)};
}

}  // namespace swlw
