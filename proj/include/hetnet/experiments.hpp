#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hetnet/config.hpp"

namespace hetnet {

using Sweep = std::vector<std::pair<std::string, std::vector<double>>>;

struct ExperimentSpec {
    std::string name;
    int trials = 0;          // 0: take harness.trials from the config
    std::uint64_t seed = 0;
    bool seed_set = false;   // otherwise the scenario seed is used
    Sweep sweep;             // overrides the experiment's default grid key by key
    std::string output_path;
};

struct ExperimentReport {
    int rows = 0;
    int feasible_rows = 0;   // rows where at least one scheme produced a solution
    int numerical_failures = 0;
    std::vector<std::string> warnings;
};

const std::vector<std::string>& experiment_names();

/// Parses "key=v1,v2,...".
std::pair<std::string, std::vector<double>> parse_sweep(const std::string& text);

/// Worker count: hardware concurrency, capped by HETNET_TR_THREADS when set.
int worker_count();

/// Writes one CSV row per (trial, sweep point) followed by one summary row per
/// sweep point. Output does not depend on the worker count.
ExperimentReport run_experiment(const ExperimentSpec& spec, const RunConfig& config, std::ostream& csv);

/// Same, writing to spec.output_path.
ExperimentReport run_experiment(const ExperimentSpec& spec, const RunConfig& config);

}  // namespace hetnet
