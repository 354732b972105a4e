#pragma once

#include <iosfwd>
#include <string>

#include "hetnet/channel.hpp"

namespace hetnet {

/// Monte Carlo knobs that are not part of the physical scenario.
struct HarnessConfig {
    int trials = 100;
    int error_draws = 10000;
    int mu_error_draws = 200;
    int oracle_probes = 2000;
    int oracle_steps = 50;
};

struct RunConfig {
    ScenarioConfig scenario;
    HarnessConfig harness;
};

/// Reads an INI file. Sections: scenario, sinr, power, channel, robust, harness.
/// dB / dBm keys are converted to linear units here; unknown keys are errors.
RunConfig load_config(const std::string& path);

/// `base_dir` resolves a relative tap-profile catalog path.
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");

/// Sets one scenario parameter by its flat key (e.g. gamma_F_db, psi, N1).
/// Returns false when the key is not a scenario parameter.
bool apply_override(ScenarioConfig& config, const std::string& key, double value);

}  // namespace hetnet
