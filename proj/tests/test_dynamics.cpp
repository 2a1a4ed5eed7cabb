#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "dense.hpp"
#include "support.hpp"

namespace swlw {
namespace {

using testing::random_complex;
using testing::random_real;

ModelParams generic_params() {
    ModelParams p;
    p.alpha = -0.3;
    p.beta = 0.7;
    p.gamma = -0.4;
    p.lambda = 0.8;
    return p;
}

TEST(Rhs, RestStateIsStationary) {
    const Grid g(20, 5.0);
    const State s(g);
    const auto d = rhs(s, generic_params());
    EXPECT_EQ(norm_p(d.du, infinity_norm), 0.0);
    EXPECT_EQ(norm_p(d.dv, infinity_norm), 0.0);
}

TEST(Rhs, ZeroShortWaveDecouples) {
    const Grid g(30, 5.0);
    const State s(0.0, ComplexGridFn(g), random_real(g));
    const auto p = generic_params();
    const auto d = rhs(s, p);
    EXPECT_EQ(norm_p(d.du, infinity_norm), 0.0);
    const auto d3 = d_cubed(s.v);
    for (int j = 2; j <= g.J() - 1; ++j) {
        const double flux = (s.v[j + 1] * s.v[j + 1] - s.v[j - 1] * s.v[j - 1]) / (2.0 * g.h());
        EXPECT_NEAR(d.dv[j], -d3[j] - p.lambda * flux, 1e-12 * (std::abs(d3[j]) + std::abs(flux)));
    }
}

TEST(Rhs, SingleNodeFreeSchrodinger) {
    const Grid g(9, 5.0);  // h = 0.5
    ComplexGridFn u(g);
    u.set(3, 1.0);
    ModelParams p;
    const auto d = rhs(State(0.0, u, RealGridFn(g)), p);
    EXPECT_EQ(d.du[2], complex(0.0, 4.0));
    EXPECT_EQ(d.du[3], complex(0.0, -8.0));
    EXPECT_EQ(d.du[4], complex(0.0, 4.0));
    EXPECT_EQ(d.du[5], complex(0.0, 0.0));
}

TEST(Invariants, MassExamples) {
    const Grid g(9, 5.0);
    ComplexGridFn u(g);
    EXPECT_EQ(mass(State(0.0, u, RealGridFn(g))), 0.0);
    u.set(4, complex(0.0, -2.0));
    EXPECT_DOUBLE_EQ(mass(State(0.0, u, RealGridFn(g))), std::sqrt(2.0));
    const auto r = random_complex(g);
    const State a(0.0, r, RealGridFn(g));
    const State b(0.0, std::polar(1.0, 0.7) * r, RealGridFn(g));
    EXPECT_NEAR(mass(a), mass(b), 1e-15);
}

// Independent double loops over the definitions.
double q_oracle(const State& s, const ModelParams& p) {
    const double h = s.grid().h();
    double vv = 0.0;
    double im = 0.0;
    for (int j = 2; j <= s.grid().J() - 1; ++j) {
        vv += h * s.v[j] * s.v[j];
        const complex d0 = (s.u[j + 1] - s.u[j - 1]) / (2.0 * h);
        im += h * (s.u[j] * std::conj(d0)).imag();
    }
    return p.alpha * vv + 2.0 * p.gamma * im;
}

double energy_oracle(const State& s, const ModelParams& p) {
    const double h = s.grid().h();
    const int J = s.grid().J();
    double du = 0.0, dv = 0.0, u4 = 0.0, gu = 0.0, F = 0.0;
    for (int j = 1; j <= J - 1; ++j) {
        du += h * std::norm((s.u[j + 1] - s.u[j]) / h);
        dv += h * std::pow((s.v[j + 1] - s.v[j]) / h, 2);
    }
    for (int j = 2; j <= J - 1; ++j) u4 += h * std::pow(std::norm(s.u[j]), 2);
    for (int j = 1; j <= J; ++j) {
        gu += h * p.trunc.coupling(s.v[j]) * std::norm(s.u[j]);
        F += h * p.trunc.flux_potential(s.v[j]);
    }
    return p.gamma * du + 0.5 * p.alpha * dv + 0.5 * p.beta * p.gamma * u4 + p.alpha * p.gamma * gu -
           p.alpha * p.lambda * F;
}

TEST(Invariants, AgreeWithIndependentSums) {
    for (int trial = 0; trial < 50; ++trial) {
        const Grid g(testing::uniform_int(6, 300), testing::uniform(1.0, 50.0));
        const State s(0.0, random_complex(g), random_real(g, 3.0));
        auto p = generic_params();
        if (trial % 2) p.trunc = TruncationFamily::active(1.5);
        const double q = q_invariant(s, p);
        EXPECT_NEAR(q, q_oracle(s, p), 1e-13 * std::abs(q));
        const double e = energy(s, p);
        EXPECT_NEAR(e, energy_oracle(s, p), 1e-13 * std::abs(e));
    }
}

TEST(Invariants, TermDropouts) {
    const Grid g(40, 5.0);
    const auto p = generic_params();
    const State rest(g);
    EXPECT_EQ(q_invariant(rest, p), 0.0);
    EXPECT_EQ(energy(rest, p), 0.0);

    const auto v = random_real(g);
    const State no_u(0.0, ComplexGridFn(g), v);
    double F = 0.0;
    for (int j = 1; j <= g.J(); ++j) F += g.h() * v[j] * v[j] * v[j] / 3.0;
    const double dv = d_plus_norm(v, 2.0);
    EXPECT_NEAR(energy(no_u, p), 0.5 * p.alpha * dv * dv - p.alpha * p.lambda * F, 1e-12);

    ComplexGridFn real_u(g);
    real_u.update([&](std::span<complex> z) {
        for (auto& x : z) x = testing::uniform(-1.0, 1.0);
    });
    const State real_state(0.0, real_u, v);
    const double nv = norm_p(v, 2.0);
    EXPECT_DOUBLE_EQ(q_invariant(real_state, p), p.alpha * nv * nv);
}

TEST(Invariants, AprioriQuantities) {
    const Grid g(50, 5.0);
    const auto p = generic_params();
    const auto zero = apriori_quantities(ComplexGridFn(g), RealGridFn(g), p);
    EXPECT_EQ(zero.E0, 0.0);
    EXPECT_EQ(zero.M0, 0.0);
    EXPECT_EQ(zero.Q0, 0.0);

    const auto v = random_real(g);
    const auto a = apriori_quantities(ComplexGridFn(g), v, p);
    double dv = 0.0, v3 = 0.0;
    for (int j = 1; j <= g.J() - 1; ++j) dv += g.h() * std::pow((v[j + 1] - v[j]) / g.h(), 2);
    for (int j = 2; j <= g.J() - 1; ++j) v3 += g.h() * std::pow(std::abs(v[j]), 3);
    EXPECT_NEAR(a.E0, 0.5 * std::abs(p.alpha) * dv + std::abs(p.alpha) / 3.0 * v3, 1e-13 * a.E0);

    const auto u = random_complex(g);
    const auto b = apriori_quantities(u, v, p);
    double du = 0.0, u4 = 0.0, vv = 0.0;
    for (int j = 1; j <= g.J() - 1; ++j) du += g.h() * std::norm((u[j + 1] - u[j]) / g.h());
    for (int j = 2; j <= g.J() - 1; ++j) {
        u4 += g.h() * std::pow(std::norm(u[j]), 2);
        vv += g.h() * v[j] * v[j];
    }
    const double expected = std::abs(p.gamma) * du + 0.5 * std::abs(p.alpha) * dv +
                            std::abs(p.alpha * p.gamma) * std::sqrt(vv) * std::sqrt(u4) +
                            std::abs(p.alpha) / 3.0 * v3 + 0.5 * std::abs(p.beta * p.gamma) * u4;
    EXPECT_NEAR(b.E0, expected, 1e-13 * expected);
    EXPECT_GE(b.M0, 0.0);
}

TEST(Rk4, RestStateAndBudget) {
    const Grid g(20, 5.0);
    const auto p = generic_params();
    const State s(g);
    const auto next = rk4_step(s, p, 0.001);
    EXPECT_EQ(next.u, s.u);
    EXPECT_EQ(next.v, s.v);
    EXPECT_DOUBLE_EQ(next.t, 0.001);
    EXPECT_THROW(rk4_step(s, p, 10.0 * rk4_dt_max(g)), InvalidParameter);
    EXPECT_THROW(rk4_step(s, p, 0.0), InvalidParameter);
}

TEST(Rk4, BlowUpIsDetected) {
    const Grid g(20, 5.0);
    ModelParams p;
    p.beta = 1.0;
    State s(g);
    s.u.set(5, complex(1e200, 0.0));
    EXPECT_THROW(rk4_step(s, p, rk4_dt_max(g)), BlowUp);
}

TEST(Rk4, LinearProblemMatchesMatrixExponential) {
    // beta = alpha = gamma = lambda = 0: u' = i Lap u, v' = -D3 v.
    const Grid g(16, 4.0);
    ModelParams p;
    p.lambda = 0.0;
    const auto s0 = testing::smooth_state(g);
    const auto A = testing::dense_operator<complex>(g, [](const ComplexGridFn& z) { return laplacian_h(z); });
    const auto B = testing::dense_operator<double>(g, [](const RealGridFn& z) { return d_cubed(z); });
    const double T = 0.4;
    const Eigen::MatrixXcd prop_u = (complex(0.0, T) * A).exp();
    const Eigen::MatrixXd prop_v = (-T * B).exp();
    const Eigen::VectorXcd u_exact = prop_u * testing::active_vector(s0.u);
    const Eigen::VectorXd v_exact = prop_v * testing::active_vector(s0.v);

    // Local RK4 error for y' = Ky is about (|K| dt)^5 / 120 |y|, so the global
    // error is bounded by rho^5 T / 120 |y0| dt^4.
    const double rho = std::max(A.cwiseAbs().rowwise().sum().maxCoeff(), B.cwiseAbs().rowwise().sum().maxCoeff());
    const double y0 = testing::active_vector(s0.u).norm() + testing::active_vector(s0.v).norm();
    std::vector<double> errors;
    for (double dt : {0.004, 0.002, 0.001}) {
        ASSERT_LE(dt, rk4_dt_max(g));
        const auto result = integrate_semidiscrete(s0, p, dt, T, 1000);
        const double eu = (testing::active_vector(result.final_state.u) - u_exact).norm();
        const double ev = (testing::active_vector(result.final_state.v) - v_exact).norm();
        errors.push_back(std::max(eu, ev));
        EXPECT_LE(errors.back(), std::pow(rho, 5) * T / 120.0 * y0 * std::pow(dt, 4)) << dt;
    }
    EXPECT_GT(errors[0] / errors[1], 12.0);
    EXPECT_LT(errors[0] / errors[1], 20.0);
    EXPECT_GT(errors[1] / errors[2], 12.0);
    EXPECT_LT(errors[1] / errors[2], 20.0);
}

TEST(Rk4, RichardsonFourthOrder) {
    const Grid g(32, 20.0);
    auto p = testing::benchmark_wave().model();
    const auto s0 = testing::smooth_state(g);
    const double T = 0.4;
    auto solve = [&](double dt) { return integrate_semidiscrete(s0, p, dt, T, 1000).final_state; };
    const auto y1 = solve(0.05), y2 = solve(0.025), y3 = solve(0.0125);
    const double d1 = norm_p(y1.u - y2.u, 2.0) + norm_p(y1.v - y2.v, 2.0);
    const double d2 = norm_p(y2.u - y3.u, 2.0) + norm_p(y2.v - y3.v, 2.0);
    EXPECT_GT(d1 / d2, 12.0);
    EXPECT_LT(d1 / d2, 20.0);
}

TEST(IntegrateSemidiscrete, RestStateAndSampling) {
    const Grid g(20, 5.0);
    const auto result = integrate_semidiscrete(State(g), generic_params(), 0.005, 0.05, 3);
    EXPECT_EQ(norm_p(result.final_state.u, infinity_norm), 0.0);
    const auto& d = result.diagnostics;
    // Samples at steps 0, 3, 6, 9, 10.
    ASSERT_EQ(d.size(), 5u);
    EXPECT_DOUBLE_EQ(d.times.back(), 0.05);
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(d.mass[i], 0.0);
        EXPECT_EQ(d.energy[i], 0.0);
        EXPECT_EQ(d.q_invariant[i], 0.0);
        EXPECT_EQ(d.v_sup[i], 0.0);
    }
    EXPECT_THROW(integrate_semidiscrete(State(g), generic_params(), 0.005, 0.05, 0), InvalidParameter);
    EXPECT_THROW(integrate_semidiscrete(State(g), generic_params(), 0.005, -1.0, 1), InvalidParameter);
}

TEST(IntegrateSemidiscrete, FailureCarriesPartialDiagnostics) {
    const Grid g(20, 5.0);
    ModelParams p;
    p.beta = 1.0;
    State s(g);
    s.u.set(5, complex(1e100, 0.0));
    try {
        integrate_semidiscrete(s, p, rk4_dt_max(g), 1.0, 1);
        FAIL() << "expected RunFailure";
    } catch (const RunFailure& e) {
        EXPECT_GE(e.diagnostics().size(), 1u);
        EXPECT_GE(e.step(), 1);
    }
}

// J = 128 on [-20, 50], T = 0.1, exact wave.
struct DriftSetup {
    Grid grid{128, testing::benchmark_L};
    TravelingWave wave = testing::benchmark_wave();
    ModelParams params = wave.model();
    State initial = initial_state(wave, grid).state;

    std::pair<double, double> drifts(double dt) const {
        const auto d = integrate_semidiscrete(initial, params, dt, 0.1, 1).diagnostics;
        double dm = 0.0, de = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            dm = std::max(dm, std::abs(d.mass[i] - d.mass[0]) / d.mass[0]);
            de = std::max(de, std::abs(d.energy[i] - d.energy[0]) / std::abs(d.energy[0]));
        }
        return {dm, de};
    }
};

TEST(Conservation, SemidiscreteDriftBounds) {
    const DriftSetup s;
    const auto [dm, de] = s.drifts(1e-4);
    EXPECT_LE(dm, 1e-8);
    EXPECT_LE(de, 1e-6);
}

TEST(Conservation, SemidiscreteDriftScalesWithDtToTheFourth) {
    const DriftSetup s;
    const auto [m1, e1] = s.drifts(0.025);
    const auto [m2, e2] = s.drifts(0.0125);
    EXPECT_LE(m1, 1e-8);
    EXPECT_LE(e1, 1e-6);
    EXPECT_GE(m1 / m2, 8.0);
    EXPECT_LE(m1 / m2, 32.0);
    EXPECT_GE(e1 / e2, 8.0);
    EXPECT_LE(e1 / e2, 32.0);
}

TEST(Truncation, InactiveTruncationIsBitwiseTransparent) {
    const DriftSetup s;
    auto truncated = s.params;
    truncated.trunc = TruncationFamily::active(10.0);
    State a = s.initial, b = s.initial;
    for (int k = 0; k < 50; ++k) {
        a = rk4_step(a, s.params, 0.01);
        b = rk4_step(b, truncated, 0.01);
        ASSERT_EQ(a.u, b.u);
        ASSERT_EQ(a.v, b.v);
    }
}

// L2 norms of rhs(sampled wave) minus the sampled exact time derivative.
std::pair<double, double> stencil_residual(int J) {
    const auto w = testing::benchmark_wave(15.0);
    const Grid g(J, testing::benchmark_L);
    const auto d = rhs(sample_wave(w, g, 0.0), w.model());
    const auto du = sample([&](double x) { return evaluate_time_derivative(w, w.origin + x, 0.0).u; }, g);
    const auto dv = sample([&](double x) { return evaluate_time_derivative(w, w.origin + x, 0.0).v; }, g);
    return {norm_p(d.du - du, 2.0), norm_p(d.dv - dv, 2.0)};
}

TEST(StencilOrder, ResidualDecreasesQuadratically) {
    auto prev = stencil_residual(250);
    for (int J : {500, 1000, 2000}) {
        const auto cur = stencil_residual(J);
        const double ru = prev.first / cur.first;
        const double rv = prev.second / cur.second;
        EXPECT_GE(ru, 3.0) << "J = " << J;
        EXPECT_LE(ru, 5.0) << "J = " << J;
        EXPECT_GE(rv, 3.0) << "J = " << J;
        EXPECT_LE(rv, 5.0) << "J = " << J;
        prev = cur;
    }
}

TEST(Conservation, QDriftDecreasesUnderRefinement) {
    const auto w = testing::benchmark_wave(15.0);
    const auto p = w.model();
    double prev = INFINITY;
    for (int J : {128, 256, 512}) {
        const Grid g(J, testing::benchmark_L);
        const double dt = 0.1 / std::ceil(0.1 / rk4_dt_max(g));
        const auto d = integrate_semidiscrete(sample_wave(w, g, 0.0), p, dt, 0.1, 1).diagnostics;
        double drift = 0.0;
        for (double q : d.q_invariant) drift = std::max(drift, std::abs(q - d.q_invariant[0]));
        EXPECT_LT(drift, prev) << "J = " << J;
        prev = drift;
    }
}

}  // namespace
}  // namespace swlw
