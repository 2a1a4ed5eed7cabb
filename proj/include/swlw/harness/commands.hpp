#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "swlw/dynamics.hpp"
#include "swlw/harness/config.hpp"
#include "swlw/harness/csv.hpp"
#include "swlw/oracle.hpp"
#include "swlw/solver.hpp"

namespace swlw::harness {

struct CommandOptions {
    std::filesystem::path output_dir = ".";
    bool quiet = true;
    int jobs = 1;
    std::ostream* log = nullptr;  // progress and warnings when !quiet
};

namespace detail {

inline void note(const CommandOptions& opts, const std::string& msg) {
    if (!opts.quiet && opts.log) *opts.log << msg << '\n';
}

inline std::filesystem::path output_path(const CommandOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.output_dir);
    return opts.output_dir / name;
}

}  // namespace detail

/// Builds the initial state a config describes, on `grid`.
inline State make_initial_state(const RunConfig& cfg, const Grid& grid, const CommandOptions& opts = {}) {
    return std::visit(
        [&](const auto& spec) -> State {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, RestInit>) {
                return State(grid);
            } else if constexpr (std::is_same_v<T, TravelingWaveInit>) {
                auto init = initial_state(*cfg.wave(), grid);
                for (const auto& w : init.warnings) detail::note(opts, "warning: " + w);
                return std::move(init.state);
            } else {
                return load_initial_csv(spec.path, grid);
            }
        },
        cfg.initial);
}

/// Largest relative deviation of a series from its first entry (absolute when
/// the first entry is zero).
inline double max_relative_drift(const std::vector<double>& series) {
    if (series.empty()) return 0.0;
    const double ref = series.front();
    double worst = 0.0;
    for (double x : series) worst = std::max(worst, std::abs(x - ref));
    return ref != 0.0 ? worst / std::abs(ref) : worst;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunSummary {
    bool ok = true;
    std::string message;
    RunDiagnostics diagnostics;
    std::optional<RelativeError> final_error;
    std::filesystem::path diagnostics_csv;
    std::optional<std::filesystem::path> errors_csv;
};

inline void write_diagnostics(CsvWriter& csv, const RunDiagnostics& d) {
    csv.header({"t", "mass", "q_invariant", "energy", "v_sup", "inner_iters_u", "inner_iters_v"});
    for (std::size_t i = 0; i < d.size(); ++i) {
        csv.row(d.times[i], d.mass[i], d.q_invariant[i], d.energy[i], d.v_sup[i], d.inner_iters_u[i],
                d.inner_iters_v[i]);
    }
}

/// One fully discrete run. Writes the diagnostics CSV and, for a
/// traveling-wave start, the error CSV. Solver failures are reported in the
/// summary (and as a trailing comment row) rather than thrown.
inline RunSummary cmd_run(const RunConfig& cfg, const CommandOptions& opts = {}) {
    const Grid grid = cfg.grid();
    const State initial = make_initial_state(cfg, grid, opts);
    const auto wave = cfg.wave();

    RunSummary summary;
    summary.diagnostics_csv = detail::output_path(opts, cfg.outputs.diagnostics);
    std::optional<CsvWriter> errors;
    if (wave) {
        summary.errors_csv = detail::output_path(opts, cfg.outputs.errors);
        errors.emplace(summary.errors_csv->string());
        errors->header({"t", "err_u", "err_v"});
    }
    auto observer = [&](const State& s) {
        if (!wave) return;
        const auto e = relative_l2_error(s, *wave);
        errors->row(s.t, e.err_u, e.err_v);
        summary.final_error = e;
    };

    if (!cfg.params.hypothesis_holds()) detail::note(opts, "note: alpha*gamma <= 0, outside the convergence theory");

    CsvWriter diag(summary.diagnostics_csv.string());
    try {
        auto result = run(initial, cfg.params, cfg.solver, cfg.outputs.sample_every, observer);
        summary.diagnostics = std::move(result.diagnostics);
        write_diagnostics(diag, summary.diagnostics);
    } catch (const RunFailure& e) {
        summary.ok = false;
        summary.message = e.what();
        summary.diagnostics = e.diagnostics();
        write_diagnostics(diag, summary.diagnostics);
        diag.comment(std::string("status: failed: ") + e.what());
        if (errors) errors->comment(std::string("status: failed: ") + e.what());
    }
    detail::note(opts, summary.ok ? "run finished" : "run failed: " + summary.message);
    return summary;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    int J = 0;
    double h = 0.0;
    double tau = 0.0;
    double T = 0.0;
    double err_u = NAN;
    double err_v = NAN;
    int max_inner_iters = 0;
    double wall_time_s = 0.0;
    std::string status = "ok";
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::filesystem::path csv;
};

/// Orders rows by h descending, i.e. coarsest mesh first.
inline void sort_report(std::vector<ConvergenceRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.h > b.h; });
}

/// Runs the configured traveling-wave problem on one mesh and measures the
/// final relative errors. Never throws for solver failures.
inline ConvergenceRow converge_one(const RunConfig& cfg, int mesh) {
    ConvergenceRow row;
    row.J = mesh;
    row.tau = cfg.solver.tau;
    row.T = cfg.solver.T;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Grid grid = cfg.grid(mesh);
        row.h = grid.h();
        const auto wave = *cfg.wave();
        const auto result = run(initial_state(wave, grid).state, cfg.params, cfg.solver, 1 << 30);
        const auto err = relative_l2_error(result.final_state, wave);
        row.err_u = err.err_u;
        row.err_v = err.err_v;
        row.max_inner_iters =
            std::max(result.diagnostics.max_inner_iters_u, result.diagnostics.max_inner_iters_v);
    } catch (const RunFailure& e) {
        row.status = "failed";
        row.max_inner_iters =
            std::max(e.diagnostics().max_inner_iters_u, e.diagnostics().max_inner_iters_v);
    } catch (const Error&) {
        row.status = "failed";
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

inline void write_convergence(const ConvergenceReport& report) {
    CsvWriter csv(report.csv.string());
    csv.header({"J", "h", "tau", "T", "err_u", "err_v", "max_inner_iters", "wall_time_s", "status"});
    for (const auto& r : report.rows) {
        csv.row(r.J, r.h, r.tau, r.T, r.err_u, r.err_v, r.max_inner_iters, r.wall_time_s, r.status);
    }
}

/// Grid-refinement sweep of the traveling-wave problem. Mesh runs are
/// independent and may be spread over `opts.jobs` threads; rows are
/// assembled in mesh order afterwards.
inline ConvergenceReport cmd_converge(const RunConfig& cfg, const std::vector<int>& meshes,
                                      const CommandOptions& opts = {}) {
    if (meshes.size() < 2) throw UsageError("converge needs at least two mesh sizes");
    for (int J : meshes) {
        if (J < Grid::min_divisions) throw UsageError("mesh size " + std::to_string(J) + " is below the minimum");
    }
    if (!cfg.wave()) throw UsageError("converge needs a traveling_wave initial condition");

    ConvergenceReport report;
    report.rows.resize(meshes.size());
    const std::size_t jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
    for (std::size_t first = 0; first < meshes.size(); first += jobs) {
        const std::size_t last = std::min(meshes.size(), first + jobs);
        if (jobs == 1) {
            report.rows[first] = converge_one(cfg, meshes[first]);
        } else {
            std::vector<std::future<ConvergenceRow>> batch;
            for (std::size_t i = first; i < last; ++i) {
                batch.push_back(std::async(std::launch::async, converge_one, std::cref(cfg), meshes[i]));
            }
            for (std::size_t i = first; i < last; ++i) report.rows[i] = batch[i - first].get();
        }
        for (std::size_t i = first; i < last; ++i) {
            const auto& r = report.rows[i];
            detail::note(opts, "J = " + std::to_string(r.J) + ": err_u = " + format_number(r.err_u) +
                                   ", err_v = " + format_number(r.err_v) + " [" + r.status + "]");
        }
    }
    sort_report(report.rows);
    report.csv = detail::output_path(opts, "convergence.csv");
    write_convergence(report);
    return report;
}

// ---------------------------------------------------------------------------
// conserve
// ---------------------------------------------------------------------------

struct ConservationReport {
    RunDiagnostics semidiscrete;
    RunDiagnostics fully_discrete;
    double reference_dt = 0.0;
    std::filesystem::path csv;
};

/// Runs the RK4 reference integrator and the fully discrete solver from the
/// same data and records both invariant series in conservation.csv
/// (long format: scheme,t,mass,q_invariant,energy,v_sup).
inline ConservationReport cmd_conserve(const RunConfig& cfg, const CommandOptions& opts = {}) {
    const Grid grid = cfg.grid();
    const State initial = make_initial_state(cfg, grid, opts);
    ConservationReport report;
    report.reference_dt = cfg.reference_dt.value_or(cfg.solver.tau);
    if (report.reference_dt > rk4_dt_max(grid) * (1.0 + 1e-12)) {
        throw UsageError("reference dt = " + format_number(report.reference_dt) +
                         " exceeds the RK4 stability budget " + format_number(rk4_dt_max(grid)) +
                         " for J = " + std::to_string(grid.J()) +
                         "; set reference.dt smaller or use a coarser grid");
    }
    const double sample_time = cfg.solver.tau * cfg.outputs.sample_every;
    const int rk4_every = std::max(1, static_cast<int>(std::lround(sample_time / report.reference_dt)));

    report.semidiscrete =
        integrate_semidiscrete(initial, cfg.params, report.reference_dt, cfg.solver.T, rk4_every).diagnostics;
    report.fully_discrete = run(initial, cfg.params, cfg.solver, cfg.outputs.sample_every).diagnostics;

    report.csv = detail::output_path(opts, "conservation.csv");
    CsvWriter csv(report.csv.string());
    csv.header({"scheme", "t", "mass", "q_invariant", "energy", "v_sup"});
    auto emit = [&](const char* name, const RunDiagnostics& d) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            csv.row(name, d.times[i], d.mass[i], d.q_invariant[i], d.energy[i], d.v_sup[i]);
        }
    };
    emit("semidiscrete", report.semidiscrete);
    emit("fully_discrete", report.fully_discrete);

    detail::note(opts, "semi-discrete drift: mass " + format_number(max_relative_drift(report.semidiscrete.mass)) +
                           ", energy " + format_number(max_relative_drift(report.semidiscrete.energy)));
    detail::note(opts, "fully discrete drift: mass " +
                           format_number(max_relative_drift(report.fully_discrete.mass)) + ", energy " +
                           format_number(max_relative_drift(report.fully_discrete.energy)));
    return report;
}

// ---------------------------------------------------------------------------
// truncate
// ---------------------------------------------------------------------------

struct TruncationRow {
    double M = 0.0;
    bool truncation_active = false;  // the run's ||v||_inf reached M
    double max_v_sup = 0.0;
    double max_diff_u = 0.0;  // max over steps of ||u_M - u_off||_inf
    double max_diff_v = 0.0;
    bool identical = true;  // bitwise equal to the untruncated run at every step
    std::string status = "ok";
};

struct TruncationReport {
    double reference_max_v_sup = 0.0;
    std::vector<TruncationRow> rows;
    std::filesystem::path csv;
};

namespace detail {
inline double sup_difference(std::span<const complex> a, std::span<const complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
inline double sup_difference(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace detail

/// Steps the untruncated problem and one truncated copy per level in
/// lockstep and compares them after every step.
inline TruncationReport cmd_truncate(const RunConfig& cfg, const std::vector<double>& levels,
                                     const CommandOptions& opts = {}) {
    if (levels.empty()) throw UsageError("truncate needs at least one level");
    for (double M : levels) {
        if (!(M >= 1.0) || !std::isfinite(M)) throw UsageError("truncation level " + format_number(M) + " is not >= 1");
    }
    cfg.solver.validate();
    const Grid grid = cfg.grid();
    const State initial = make_initial_state(cfg, grid, opts);

    ModelParams off = cfg.params;
    off.trunc = TruncationFamily::off();

    struct Track {
        ModelParams params;
        State state;
        bool alive;
    };
    TruncationReport report;
    std::vector<Track> tracks;
    for (double M : levels) {
        ModelParams p = cfg.params;
        p.trunc = TruncationFamily::active(M);
        tracks.push_back({p, initial, true});
        TruncationRow row;
        row.M = M;
        row.max_v_sup = norm_p(initial.v, infinity_norm);
        row.truncation_active = row.max_v_sup > M;
        report.rows.push_back(row);
    }

    State reference = initial;
    report.reference_max_v_sup = norm_p(initial.v, infinity_norm);
    const long steps = swlw::detail::step_count(cfg.solver.tau, cfg.solver.T);
    for (long k = 1; k <= steps; ++k) {
        reference = step(reference, off, cfg.solver);
        reference.t = initial.t + static_cast<double>(k) * cfg.solver.tau;
        report.reference_max_v_sup = std::max(report.reference_max_v_sup, norm_p(reference.v, infinity_norm));
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            auto& tr = tracks[i];
            auto& row = report.rows[i];
            if (!tr.alive) continue;
            try {
                tr.state = step(tr.state, tr.params, cfg.solver);
                tr.state.t = reference.t;
                if (!is_finite(tr.state)) throw BlowUp(tr.state.t, cfg.solver.tau);
            } catch (const Error& e) {
                tr.alive = false;
                row.status = "failed";
                detail::note(opts, "M = " + format_number(row.M) + " failed: " + e.what());
                continue;
            }
            const double vsup = norm_p(tr.state.v, infinity_norm);
            row.max_v_sup = std::max(row.max_v_sup, vsup);
            row.truncation_active = row.truncation_active || vsup > row.M;
            row.max_diff_u = std::max(row.max_diff_u, detail::sup_difference(tr.state.u.values(), reference.u.values()));
            row.max_diff_v = std::max(row.max_diff_v, detail::sup_difference(tr.state.v.values(), reference.v.values()));
            row.identical = row.identical && tr.state.u == reference.u && tr.state.v == reference.v;
        }
    }

    report.csv = detail::output_path(opts, "truncation.csv");
    CsvWriter csv(report.csv.string());
    csv.header({"M", "truncation_active", "max_v_sup", "max_diff_u", "max_diff_v", "identical", "status"});
    for (const auto& r : report.rows) {
        csv.row(r.M, r.truncation_active, r.max_v_sup, r.max_diff_u, r.max_diff_v, r.identical, r.status);
        detail::note(opts, "M = " + format_number(r.M) + ": active = " + (r.truncation_active ? "yes" : "no") +
                               ", max diff v = " + format_number(r.max_diff_v));
    }
    return report;
}

}  // namespace swlw::harness
