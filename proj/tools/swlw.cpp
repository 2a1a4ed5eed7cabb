// Command-line driver: run, converge, conserve and truncate.
//
// Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
// solver run fails (partial output is still written).

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swlw/harness/commands.hpp"

namespace {

using namespace swlw;
using namespace swlw::harness;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_solver = 2;

struct Common {
    std::string config;
    std::string output_dir = ".";
    std::string profile;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("config", c.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("-o,--output-dir", c.output_dir, "Directory for CSV output");
    cmd->add_option("--profile", c.profile, "Override tau and T with a preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_flag("-q,--quiet", c.quiet, "Suppress progress messages");
}

RunConfig load(const Common& c) {
    RunConfig cfg = load_config(c.config);
    if (!c.profile.empty()) apply_profile(cfg, profile(c.profile));
    return cfg;
}

CommandOptions options(const Common& c, int jobs = 1) {
    CommandOptions o;
    o.output_dir = c.output_dir;
    o.quiet = c.quiet;
    o.jobs = jobs;
    o.log = &std::cerr;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-difference solver for the coupled Schrodinger-KdV system"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run_cmd = app.add_subcommand("run", "Integrate one configuration and write diagnostics");
    add_common(run_cmd, run_opts);

    Common conv_opts;
    std::vector<int> meshes;
    int jobs = 1;
    auto* conv_cmd = app.add_subcommand("converge", "Mesh-refinement sweep against the traveling wave");
    add_common(conv_cmd, conv_opts);
    conv_cmd->add_option("--meshes", meshes, "Mesh sizes J (default: the profile's sweep)")->delimiter(',');
    conv_cmd->add_option("-j,--jobs", jobs, "Meshes run concurrently")->check(CLI::PositiveNumber);

    Common cons_opts;
    auto* cons_cmd = app.add_subcommand("conserve", "Invariant drift of the reference and fully discrete schemes");
    add_common(cons_cmd, cons_opts);

    Common trunc_opts;
    std::vector<double> levels;
    auto* trunc_cmd = app.add_subcommand("truncate", "Compare truncated runs with the untruncated one");
    add_common(trunc_cmd, trunc_opts);
    trunc_cmd->add_option("--levels", levels, "Truncation levels M")->delimiter(',')->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run_cmd) {
            const auto summary = cmd_run(load(run_opts), options(run_opts));
            if (!summary.ok) {
                std::cerr << "error: " << summary.message << '\n';
                return exit_solver;
            }
        } else if (*conv_cmd) {
            const RunConfig cfg = load(conv_opts);
            if (meshes.empty()) meshes = profile(conv_opts.profile.empty() ? "desk" : conv_opts.profile).meshes;
            const auto report = cmd_converge(cfg, meshes, options(conv_opts, jobs));
            for (const auto& row : report.rows) {
                if (row.status != "ok") return exit_solver;
            }
        } else if (*cons_cmd) {
            cmd_conserve(load(cons_opts), options(cons_opts));
        } else if (*trunc_cmd) {
            const auto report = cmd_truncate(load(trunc_opts), levels, options(trunc_opts));
            for (const auto& row : report.rows) {
                if (row.status != "ok") return exit_solver;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_solver;
    }
    return exit_ok;
}
