#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "swlw/dynamics.hpp"
#include "swlw/errors.hpp"
#include "swlw/grid.hpp"
#include "swlw/oracle.hpp"
#include "swlw/solver.hpp"
#include "swlw/truncation.hpp"

namespace swlw::harness {

/// Invalid configuration document; `key()` is the dotted path of the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what) : Error(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Bad command-line usage (wrong list sizes and similar).
class UsageError : public Error {
public:
    using Error::Error;
};

struct RestInit {};

struct TravelingWaveInit {
    std::optional<double> alpha;  // defaults to params.alpha
    double omega = 0.0;
    double x0 = 0.0;
};

struct FileInit {
    std::string path;
};

using InitialSpec = std::variant<RestInit, TravelingWaveInit, FileInit>;

struct OutputSpec {
    std::string diagnostics = "diagnostics.csv";
    std::string errors = "errors.csv";
    int sample_every = 10;
};

struct RunConfig {
    double origin = 0.0;  // physical coordinate of node 0
    double L = 0.0;
    int J = 0;
    SolverConfig solver;
    ModelParams params;
    InitialSpec initial = RestInit{};
    OutputSpec outputs;
    std::optional<double> reference_dt;  // RK4 step for `conserve`; defaults to tau

    Grid grid() const { return Grid(J, L); }
    Grid grid(int mesh) const { return Grid(mesh, L); }

    std::optional<TravelingWave> wave() const {
        if (const auto* tw = std::get_if<TravelingWaveInit>(&initial)) {
            return TravelingWave::make(tw->alpha.value_or(params.alpha), tw->omega, tw->x0, origin);
        }
        return std::nullopt;
    }
};

namespace detail {

using nlohmann::json;

inline std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) throw ConfigError(join(path, key), "unknown key");
    }
}

// Accepts JSON numbers and "p/q" strings such as "-1/12".
inline double to_real(const json& node, const std::string& path) {
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) {
        const auto s = node.get<std::string>();
        const auto slash = s.find('/');
        auto parse = [&](std::string_view text) {
            double x = 0.0;
            const auto* first = text.data();
            const auto* last = text.data() + text.size();
            const auto res = std::from_chars(first, last, x);
            if (res.ec != std::errc{} || res.ptr != last) throw ConfigError(path, "not a number: '" + s + "'");
            return x;
        };
        if (slash == std::string::npos) return parse(s);
        const double den = parse(std::string_view(s).substr(slash + 1));
        if (den == 0.0) throw ConfigError(path, "zero denominator");
        return parse(std::string_view(s).substr(0, slash)) / den;
    }
    throw ConfigError(path, "expected a number");
}

inline double required_real(const json& obj, const std::string& prefix, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join(prefix, key), "missing required key");
    return to_real(obj.at(key), join(prefix, key));
}

inline double optional_real(const json& obj, const std::string& prefix, const char* key, double fallback) {
    return obj.contains(key) ? to_real(obj.at(key), join(prefix, key)) : fallback;
}

inline int to_int(const json& node, const std::string& path) {
    if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
    return node.get<int>();
}

inline std::string to_text(const json& node, const std::string& path) {
    if (!node.is_string()) throw ConfigError(path, "expected a string");
    return node.get<std::string>();
}

inline void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

}  // namespace detail

/// Parses and validates a JSON run configuration.
///
/// Required: domain, J, tau, T, params.{alpha, beta, gamma}, initial.
/// Defaults: params.lambda = 1, truncation = "off", solver.tol = 1e-6,
/// solver.max_iter = 50, outputs as in OutputSpec.
inline RunConfig parse_config(std::string_view text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", e.what());
    }
    detail::reject_unknown(doc, "",
                           {"domain", "J", "tau", "T", "params", "truncation", "solver", "initial", "outputs",
                            "reference"});
    RunConfig cfg;

    if (!doc.contains("domain")) throw ConfigError("domain", "missing required key");
    const auto& domain = doc["domain"];
    detail::reject_unknown(domain, "domain", {"L", "interval"});
    if (domain.contains("L") == domain.contains("interval")) {
        throw ConfigError("domain", "give exactly one of 'L' or 'interval'");
    }
    if (domain.contains("L")) {
        cfg.L = detail::to_real(domain["L"], "domain.L");
    } else {
        const auto& iv = domain["interval"];
        detail::require(iv.is_array() && iv.size() == 2, "domain.interval", "expected [a, b]");
        const double a = detail::to_real(iv[0], "domain.interval[0]");
        const double b = detail::to_real(iv[1], "domain.interval[1]");
        cfg.origin = a;
        cfg.L = b - a;
    }
    detail::require(cfg.L > 0.0 && std::isfinite(cfg.L), "domain", "domain length must be positive");

    if (!doc.contains("J")) throw ConfigError("J", "missing required key");
    cfg.J = detail::to_int(doc["J"], "J");
    detail::require(cfg.J >= Grid::min_divisions, "J", "must be >= " + std::to_string(Grid::min_divisions));

    cfg.solver.tau = detail::required_real(doc, "", "tau");
    detail::require(cfg.solver.tau > 0.0, "tau", "must be positive");
    cfg.solver.T = detail::required_real(doc, "", "T");
    detail::require(cfg.solver.T > 0.0, "T", "must be positive");

    if (!doc.contains("params")) throw ConfigError("params", "missing required key");
    const auto& params = doc["params"];
    detail::reject_unknown(params, "params", {"alpha", "beta", "gamma", "lambda"});
    cfg.params.alpha = detail::required_real(params, "params", "alpha");
    cfg.params.beta = detail::required_real(params, "params", "beta");
    cfg.params.gamma = detail::required_real(params, "params", "gamma");
    cfg.params.lambda = detail::optional_real(params, "params", "lambda", 1.0);

    if (doc.contains("truncation")) {
        const auto& tr = doc["truncation"];
        if (tr.is_string()) {
            detail::require(tr.get<std::string>() == "off", "truncation", "expected \"off\" or {\"M\": level}");
        } else {
            detail::reject_unknown(tr, "truncation", {"M"});
            const double M = detail::required_real(tr, "truncation", "M");
            detail::require(M >= 1.0 && std::isfinite(M), "truncation.M", "must be finite and >= 1");
            cfg.params.trunc = TruncationFamily::active(M);
        }
    }

    if (doc.contains("solver")) {
        const auto& sv = doc["solver"];
        detail::reject_unknown(sv, "solver", {"tol", "max_iter"});
        cfg.solver.tol = detail::optional_real(sv, "solver", "tol", cfg.solver.tol);
        detail::require(cfg.solver.tol > 0.0, "solver.tol", "must be positive");
        if (sv.contains("max_iter")) cfg.solver.max_iter = detail::to_int(sv["max_iter"], "solver.max_iter");
        detail::require(cfg.solver.max_iter >= 1, "solver.max_iter", "must be >= 1");
    }

    if (!doc.contains("initial")) throw ConfigError("initial", "missing required key");
    const auto& init = doc["initial"];
    detail::reject_unknown(init, "initial", {"traveling_wave", "file", "rest"});
    detail::require(init.size() == 1, "initial", "give exactly one of traveling_wave, file, rest");
    if (init.contains("traveling_wave")) {
        const auto& tw = init["traveling_wave"];
        detail::reject_unknown(tw, "initial.traveling_wave", {"alpha", "omega", "x0"});
        TravelingWaveInit spec;
        if (tw.contains("alpha")) spec.alpha = detail::to_real(tw["alpha"], "initial.traveling_wave.alpha");
        spec.omega = detail::optional_real(tw, "initial.traveling_wave", "omega", 0.0);
        spec.x0 = detail::optional_real(tw, "initial.traveling_wave", "x0", 0.0);
        const double a = spec.alpha.value_or(cfg.params.alpha);
        detail::require(a >= -1.0 / 6.0 && a <= 0.0, "initial.traveling_wave.alpha", "must lie in [-1/6, 0]");
        cfg.initial = spec;
    } else if (init.contains("file")) {
        detail::require(init["file"].is_string(), "initial.file", "expected a path");
        cfg.initial = FileInit{init["file"].get<std::string>()};
    } else {
        cfg.initial = RestInit{};
    }

    if (doc.contains("outputs")) {
        const auto& out = doc["outputs"];
        detail::reject_unknown(out, "outputs", {"diagnostics", "errors", "sample_every"});
        if (out.contains("diagnostics")) cfg.outputs.diagnostics = detail::to_text(out["diagnostics"], "outputs.diagnostics");
        if (out.contains("errors")) cfg.outputs.errors = detail::to_text(out["errors"], "outputs.errors");
        if (out.contains("sample_every")) {
            cfg.outputs.sample_every = detail::to_int(out["sample_every"], "outputs.sample_every");
        }
        detail::require(cfg.outputs.sample_every >= 1, "outputs.sample_every", "must be >= 1");
    }

    if (doc.contains("reference")) {
        const auto& ref = doc["reference"];
        detail::reject_unknown(ref, "reference", {"dt"});
        cfg.reference_dt = detail::required_real(ref, "reference", "dt");
        detail::require(*cfg.reference_dt > 0.0, "reference.dt", "must be positive");
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<document>", "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    // Relative initial-data paths resolve against the config's directory.
    if (auto* file = std::get_if<FileInit>(&cfg.initial)) {
        const std::filesystem::path p(file->path);
        if (p.is_relative()) file->path = (path.parent_path() / p).string();
    }
    return cfg;
}

/// Reads initial data from CSV with header `x,re_u,im_u,v` and J+2 rows, one per node.
inline State load_initial_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read initial data " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "x,re_u,im_u,v") throw InputError(path.string() + ": expected header x,re_u,im_u,v");
    std::vector<complex> u;
    std::vector<double> v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double fields[4];
        std::string_view rest(line);
        for (int k = 0; k < 4; ++k) {
            const auto comma = rest.find(',');
            const auto tok = rest.substr(0, comma);
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), fields[k]);
            if (res.ec != std::errc{} || !std::isfinite(fields[k])) {
                throw InputError(path.string() + ": bad value on data row " + std::to_string(v.size()));
            }
            if (k < 3 && comma == std::string_view::npos) throw InputError(path.string() + ": expected 4 columns");
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        u.emplace_back(fields[1], fields[2]);
        v.push_back(fields[3]);
    }
    if (v.size() != grid.size()) {
        throw InputError(path.string() + ": expected " + std::to_string(grid.size()) + " rows, got " +
                         std::to_string(v.size()));
    }
    return State(0.0, ComplexGridFn(grid, std::move(u)), RealGridFn(grid, std::move(v)));
}

/// Named (tau, T) presets.
///   desk:  tau = 1e-3, T = 1   (default sweep J = 250, 500, 1000)
///   paper: tau = 1e-4, T = 5   (default sweep J = 500..2500)
struct Profile {
    double tau;
    double T;
    std::vector<int> meshes;
};

inline Profile profile(std::string_view name) {
    if (name == "desk") return {1e-3, 1.0, {250, 500, 1000}};
    if (name == "paper") return {1e-4, 5.0, {500, 1000, 1500, 2000, 2500}};
    throw UsageError("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

inline void apply_profile(RunConfig& cfg, const Profile& p) {
    cfg.solver.tau = p.tau;
    cfg.solver.T = p.T;
}

}  // namespace swlw::harness
