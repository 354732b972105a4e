#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/config.hpp"
#include "hetnet/experiments.hpp"
#include "hetnet/power.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, infeasible = 3, numerical = 4 };

int exit_code(const hetnet::Error& e) {
    switch (e.kind()) {
        case hetnet::ErrorKind::infeasible:
            return infeasible;
        case hetnet::ErrorKind::numerical:
            return numerical;
        default:
            return config_error;
    }
}

void print_warnings(const std::vector<std::string>& warnings) {
    std::map<std::string, int> seen;
    for (const auto& w : warnings) ++seen[w];
    int shown = 0;
    for (const auto& [w, n] : seen) {
        if (shown++ == 10) {
            std::cerr << "warning: ... " << seen.size() - 10 << " more distinct warnings\n";
            break;
        }
        std::cerr << "warning: " << w;
        if (n > 1) std::cerr << " (x" << n << ")";
        std::cerr << '\n';
    }
}

// Draws a handful of realizations and runs the proposed pipeline on each.
int validate(const std::string& path) {
    const hetnet::RunConfig rc = hetnet::load_config(path);
    const auto& s = rc.scenario;
    constexpr int probes = 20;
    int feasible = 0;
    for (int t = 0; t < probes; ++t) {
        hetnet::Rng rng = hetnet::make_stream(s.seed, static_cast<std::uint64_t>(t));
        const auto geo = hetnet::place_nodes(s, rng);
        const auto ch = hetnet::draw_channel_set(s, geo, rng);
        try {
            hetnet::solve_proposed(ch, hetnet::RVec::Constant(s.N0, s.gamma_M), hetnet::RVec::Constant(s.N1, s.gamma_F),
                                   s.p_tol, s.noise_power, s.schedule);
            ++feasible;
        } catch (const hetnet::Error& e) {
            if (e.kind() != hetnet::ErrorKind::infeasible) throw;
        }
    }
    std::cout << "config ok: M0=" << s.M0 << " M1=" << s.M1 << " N0=" << s.N0 << " N1=" << s.N1 << " L=" << s.L
              << "\nproposed scheme feasible on " << feasible << " of " << probes << " sample realizations\n";
    return feasible > 0 ? ok : infeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-tier HetNet downlink simulator: ZF macrocell, time-reversal femtocell"};
    app.require_subcommand(1);

    hetnet::ExperimentSpec spec;
    std::string config_path;
    std::vector<std::string> sweeps;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "run a Monte Carlo experiment and write CSV");
    run->add_option("--experiment", spec.name, "experiment name")
        ->required()
        ->check(CLI::IsMember(hetnet::experiment_names()));
    run->add_option("--config", config_path, "INI configuration file")->required();
    run->add_option("--out", spec.output_path, "output CSV path")->required();
    run->add_option("--trials", spec.trials, "number of random realizations")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "master seed");
    run->add_option("--sweep", sweeps, "parameter grid, key=v1,v2,... (repeatable)");

    std::string validate_path;
    auto* val = app.add_subcommand("validate", "check a configuration file");
    val->add_option("--config", validate_path, "INI configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*val) return validate(validate_path);

        const hetnet::RunConfig rc = hetnet::load_config(config_path);
        for (const auto& s : sweeps) spec.sweep.push_back(hetnet::parse_sweep(s));
        if (*seed_opt) {
            spec.seed = seed;
            spec.seed_set = true;
        }
        const auto report = hetnet::run_experiment(spec, rc);
        print_warnings(report.warnings);
        std::cerr << spec.name << ": " << report.rows << " rows, " << report.feasible_rows << " with a solution -> "
                  << spec.output_path << '\n';
        if (report.numerical_failures > 0) {
            std::cerr << "error: " << report.numerical_failures << " numerical failures\n";
            return numerical;
        }
        return report.feasible_rows == 0 ? infeasible : ok;
    } catch (const hetnet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    }
}
