#include "hetnet/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hetnet {

namespace pt = boost::property_tree;

namespace {

int as_count(double v, const std::string& key) {
    require(std::isfinite(v) && v == std::floor(v) && v >= 1 && v <= 1e6, ErrorKind::config,
            key + " must be a positive integer");
    return static_cast<int>(v);
}

double number(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::config, key + ": not a number: '" + text + "'");
    }
    require(used == text.size() && std::isfinite(v), ErrorKind::config, key + ": not a number: '" + text + "'");
    return v;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario",
         {"M0", "M1", "N0", "N1", "L", "macro_radius_m", "femto_radius_m", "fbs_distance_m", "fu_distance_m",
          "seed"}},
        {"sinr", {"gamma_M_db", "gamma_F_db", "noise_power_w"}},
        {"power", {"p_tol_dbm", "step_a", "step_b", "max_iter"}},
        {"channel",
         {"catalog", "macro_profile", "macro_exponent", "macro_gain_db", "femto_profile", "femto_exponent",
          "femto_gain_db", "down_profile", "down_exponent", "down_gain_db", "up_profile", "up_exponent",
          "up_gain_db"}},
        {"robust", {"psi", "xi"}},
        {"harness", {"trials", "error_draws", "mu_error_draws", "oracle_probes", "oracle_steps"}},
    };
    return keys;
}

}  // namespace

bool apply_override(ScenarioConfig& c, const std::string& key, double v) {
    if (key == "M0") c.M0 = as_count(v, key);
    else if (key == "M1") c.M1 = as_count(v, key);
    else if (key == "N0") c.N0 = as_count(v, key);
    else if (key == "N1") c.N1 = as_count(v, key);
    else if (key == "L") c.L = as_count(v, key);
    else if (key == "macro_radius_m") c.macro_radius = v;
    else if (key == "femto_radius_m") c.femto_radius = v;
    else if (key == "fbs_distance_m") c.fbs_distance = v;
    else if (key == "fu_distance_m") c.fixed_fu_distance = v;
    else if (key == "gamma_M_db") c.gamma_M = db_to_linear(v);
    else if (key == "gamma_F_db") c.gamma_F = db_to_linear(v);
    else if (key == "noise_power_w") c.noise_power = v;
    else if (key == "p_tol_dbm") c.p_tol = dbm_to_watts(v);
    else if (key == "step_a") c.schedule.a = v;
    else if (key == "step_b") c.schedule.b = v;
    else if (key == "max_iter") c.schedule.max_iter = as_count(v, key);
    else if (key == "psi") c.psi = v;
    else if (key == "xi") c.xi = v;
    else return false;
    return true;
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::config, std::string("config: ") + e.what());
    }

    RunConfig rc;
    ScenarioConfig& sc = rc.scenario;
    std::map<std::string, std::string> profile_names;
    std::string catalog_path;

    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        require(it != known_keys().end(), ErrorKind::config, "config: unknown section [" + section + "]");
        require(body.data().empty() || !body.empty(), ErrorKind::config,
                "config: key '" + section + "' outside any section");
        for (const auto& [key, node] : body) {
            const std::string where = section + "." + key;
            require(it->second.count(key) == 1, ErrorKind::config, "config: unknown key " + where);
            const std::string text = node.get_value<std::string>();
            if (section == "channel" && (key == "catalog" || key.ends_with("_profile"))) {
                if (key == "catalog") catalog_path = text;
                else profile_names[key.substr(0, key.find('_'))] = text;
                continue;
            }
            const double v = number(text, where);
            if (section == "scenario" && key == "seed") {
                require(v >= 0 && v == std::floor(v) && v < 1.8e19, ErrorKind::config,
                        "config: seed must be a nonnegative integer");
                sc.seed = static_cast<std::uint64_t>(v);
            } else if (section == "channel") {
                const std::string link = key.substr(0, key.find('_'));
                LinkModel* lm = link == "macro" ? &sc.model.macro
                                : link == "femto" ? &sc.model.femto
                                : link == "down"  ? &sc.model.down
                                                  : &sc.model.up;
                if (key.ends_with("_exponent")) lm->exponent = v;
                else lm->gain = db_to_linear(v);
            } else if (section == "harness") {
                const int n = as_count(v, where);
                if (key == "trials") rc.harness.trials = n;
                else if (key == "error_draws") rc.harness.error_draws = n;
                else if (key == "mu_error_draws") rc.harness.mu_error_draws = n;
                else if (key == "oracle_probes") rc.harness.oracle_probes = n;
                else rc.harness.oracle_steps = n;
            } else {
                apply_override(sc, key, v);
            }
        }
    }

    if (!profile_names.empty() || !catalog_path.empty()) {
        std::filesystem::path p = catalog_path.empty() ? std::filesystem::path(HETNET_DATA_DIR) / "tap_profiles.json"
                                                       : std::filesystem::path(catalog_path);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        const auto catalog = load_tap_profiles(p.string());
        for (const auto& [link, name] : profile_names) {
            LinkModel& lm = link == "macro" ? sc.model.macro
                            : link == "femto" ? sc.model.femto
                            : link == "down"  ? sc.model.down
                                              : sc.model.up;
            lm.profile = find_profile(catalog, name);
        }
    }
    sc.validate();
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::config, "cannot open config file: " + path);
    return parse_config(in, std::filesystem::path(path).parent_path().string());
}

}  // namespace hetnet
