#include "hetnet/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "hetnet/power.hpp"
#include "hetnet/robust.hpp"

namespace hetnet {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
// Relative slack before a threshold miss counts as an outage.
constexpr double kOutageSlack = 1e-5;

using Point = std::map<std::string, double>;

struct Record {
    std::vector<double> flags;
    std::vector<double> values;
    int numerical = 0;
    std::vector<std::string> warnings;
};

struct Context {
    const ScenarioConfig& cfg;
    const HarnessConfig& harness;
    const Point& point;
    int trial;
    std::uint64_t seed;
    std::size_t point_index;

    double key(const std::string& k) const { return point.at(k); }
    Rng channel_stream() const { return make_stream(seed, static_cast<std::uint64_t>(trial)); }
    Rng error_stream() const {
        return make_stream(seed ^ 0x9e3779b97f4a7c15ull,
                           (static_cast<std::uint64_t>(point_index) << 32) | static_cast<std::uint32_t>(trial));
    }
};

struct Experiment {
    std::string name;
    Sweep defaults;
    std::vector<std::string> extra_keys;  // sweep keys that are not scenario parameters
    std::vector<std::string> flags;
    std::vector<std::string> values;
    std::function<void(ScenarioConfig&)> prepare;
    std::function<void(const Context&, Record&)> trial;
};

std::vector<double> grid(double from, double to, double step) {
    std::vector<double> v;
    for (int k = 0; from + k * step <= to + 1e-9; ++k) v.push_back(from + k * step);
    return v;
}

RVec constant(int n, double v) { return RVec::Constant(n, v); }

double db(double x) { return 10.0 * std::log10(x); }

// Runs `body`, turning solver failures into a missing result.
template <typename F>
bool attempt(Record& rec, F&& body) {
    try {
        body();
        return true;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::numerical) {
            ++rec.numerical;
            rec.warnings.push_back(e.what());
        } else if (e.kind() != ErrorKind::infeasible) {
            throw;
        }
        return false;
    }
}

void power_compare(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet ch = draw_channel_set(s, geo, rng);
    const RVec gM = constant(s.N0, s.gamma_M);
    const RVec gF = constant(s.N1, s.gamma_F);

    rec.flags = {0.0, 0.0};
    rec.values.assign(6, kMissing);
    BeamformerSet beams;
    if (!attempt(rec, [&] { beams = design_beams(ch); })) return;
    AllocationResult central, proposed;
    const bool ok_c = attempt(rec, [&] { central = solve_centralized(ch, beams, gM, gF, s.noise_power); });
    const bool ok_p =
        attempt(rec, [&] { proposed = solve_proposed(ch, beams, gM, gF, s.p_tol, s.noise_power, s.schedule); });
    rec.flags = {ok_c ? 1.0 : 0.0, ok_p ? 1.0 : 0.0};
    if (ok_c) rec.values[0] = central.total_power;
    if (ok_p) {
        rec.values[1] = proposed.total_power;
        rec.values[2] = proposed.p0.sum();
        rec.values[3] = proposed.p1.sum();
        rec.values[4] = static_cast<double>(proposed.iterations);
    }
    if (ok_c && ok_p) rec.values[5] = db(proposed.total_power / central.total_power);
}

void mu_outage(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet ch = draw_channel_set(s, geo, rng);
    const RVec gM = constant(s.N0, s.gamma_M);
    const RVec gF = constant(s.N1, s.gamma_F);
    rec.flags = {0.0};
    rec.values.assign(3, kMissing);

    BeamformerSet beams;
    PowerVector p1;
    if (!attempt(rec, [&] {
            beams = design_beams(ch);
            p1 = solve_femto(build_femto_lp(ch, beams.g, gF, s.p_tol, s.noise_power));
        }))
        return;

    Rng err = c.error_stream();
    const int draws = c.harness.mu_error_draws;
    long outages = 0;
    long samples = 0;
    double sinr_sum = 0.0;
    double sinr_min = std::numeric_limits<double>::infinity();
    for (int d = 0; d < draws; ++d) {
        // The FBS only knows h10 up to the error factor xi.
        ChannelSet est = ch;
        for (int i = 0; i < s.M1; ++i)
            for (int n = 0; n < s.N0; ++n)
                est.h10(i, n) = perturb_cir(ch.h10(i, n), s.xi, PerturbMode::uniform_ball, err).h_est;
        const RVec report = cross_report(est, beams.g, p1);
        MacroSolution macro;
        if (!attempt(rec, [&] {
                macro = solve_macro(ch, beams.u, beams.alpha, gM, s.p_tol, report, s.noise_power, s.schedule);
                macro.require_feasible();
            }))
            continue;
        for (int n = 0; n < s.N0; ++n) {
            const double v = sinr(mu_breakdown(ch, beams, macro.p, p1, n, s.noise_power));
            ++samples;
            sinr_sum += v;
            sinr_min = std::min(sinr_min, v);
            if (v < s.gamma_M * (1.0 - kOutageSlack)) ++outages;
        }
    }
    if (samples == 0) return;
    rec.flags = {1.0};
    rec.values = {static_cast<double>(outages) / static_cast<double>(samples),
                  sinr_sum / static_cast<double>(samples), db(sinr_min)};
}

void tr_vs_zf(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet ch = draw_channel_set(s, geo, rng);
    const double p = dbm_to_watts(c.key("tx_power_dbm")) / s.N1;
    const RVec pv = constant(s.N1, p);
    rec.flags = {0.0};
    rec.values.assign(2, kMissing);

    const CirArray g = tr_beamformers(ch.h1);
    const ZfPolicy policy =
        s.M1 * s.L >= (2 * s.L - 1) * s.N1 ? ZfPolicy::exact : ZfPolicy::least_squares;
    ZfSelection zf;
    if (!attempt(rec, [&] { zf = zf_select(ch.h1, policy); })) return;
    double tr = 0.0;
    double z = 0.0;
    for (int j = 0; j < s.N1; ++j) {
        tr += sinr(cell_breakdown(g, ch.h1, pv, j, s.L - 1, s.noise_power));
        z += sinr(cell_breakdown(zf.u, ch.h1, pv, j, zf.alpha[static_cast<std::size_t>(j)], s.noise_power));
    }
    rec.flags = {1.0};
    rec.values = {tr / s.N1, z / s.N1};
}

void bound_tightness(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet ch = draw_channel_set(s, geo, rng);
    const auto h = ch.h1.user(0);
    const auto g = tr_beamformer(ch.h1, 0);

    const double young = young_upper(g, h, s.psi);
    const double prop = proposed_upper(g, h, s.psi);
    Rng err = c.error_stream();
    const OracleResult o = worst_case_oracle(g, h, s.psi, c.harness.oracle_probes, c.harness.oracle_steps, err);
    const bool violated = o.max_total > prop * (1.0 + 1e-9);
    if (violated)
        rec.warnings.push_back("trial " + std::to_string(c.trial) + ": oracle energy exceeds the proposed bound");
    rec.flags = {young >= prop ? 1.0 : 0.0, violated ? 1.0 : 0.0};
    rec.values = {young, prop, o.max_total, db(young / prop), worst_signal_lower(g, h, s.psi), o.probe_signal,
                  o.min_signal};
}

struct Design {
    bool ok = false;
    PowerVector p;
};

void fu_outage(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet est = draw_channel_set(s, geo, rng);
    const RVec gF = constant(s.N1, s.gamma_F);
    const CirArray g = tr_beamformers(est.h1);

    Design design[3];
    design[0].ok = attempt(rec, [&] { design[0].p = solve_femto(build_femto_lp(est, g, gF, s.p_tol, s.noise_power)); });
    for (int k = 1; k < 3; ++k) {
        design[k].ok = attempt(rec, [&] {
            const RobustBounds b = assemble_bounds(est, g, s.psi, k == 1 ? BoundKind::young : BoundKind::proposed);
            for (const auto& w : b.warnings) rec.warnings.push_back(w);
            design[k].p = solve_robust(b, gF, s.p_tol, s.noise_power);
        });
    }

    long outages[3] = {0, 0, 0};
    double worst[3];
    std::fill(std::begin(worst), std::end(worst), std::numeric_limits<double>::infinity());
    Rng err = c.error_stream();
    const double floor_power = s.p_tol + s.noise_power;  // cross-tier held at its tolerable level
    CirArray truth(s.M1, s.N1, s.L);
    for (int d = 0; d < c.harness.error_draws; ++d) {
        for (int i = 0; i < s.M1; ++i)
            for (int j = 0; j < s.N1; ++j) truth(i, j) = sample_true_given_estimate(est.h1(i, j), s.psi, err);
        for (int k = 0; k < 3; ++k) {
            if (!design[k].ok) continue;
            for (int j = 0; j < s.N1; ++j) {
                const double v = sinr(cell_breakdown(g, truth, design[k].p, j, s.L - 1, floor_power));
                worst[k] = std::min(worst[k], v);
                if (v < s.gamma_F * (1.0 - kOutageSlack)) ++outages[k];
            }
        }
    }
    const double samples = static_cast<double>(c.harness.error_draws) * s.N1;
    rec.flags.clear();
    rec.values.clear();
    for (int k = 0; k < 3; ++k) rec.flags.push_back(design[k].ok ? 1.0 : 0.0);
    for (int k = 0; k < 3; ++k) rec.values.push_back(design[k].ok ? design[k].p.sum() : kMissing);
    for (int k = 0; k < 3; ++k) rec.values.push_back(design[k].ok ? outages[k] / samples : kMissing);
    for (int k = 0; k < 3; ++k) rec.values.push_back(design[k].ok ? db(worst[k]) : kMissing);
}

void robust_power(const Context& c, Record& rec) {
    const ScenarioConfig& s = c.cfg;
    Rng rng = c.channel_stream();
    const Geometry geo = place_nodes(s, rng);
    const ChannelSet est = draw_channel_set(s, geo, rng);
    const RVec gF = constant(s.N1, s.gamma_F);
    const CirArray g = tr_beamformers(est.h1);
    rec.flags.assign(3, 0.0);
    rec.values.assign(3, kMissing);
    PowerVector p;
    if (attempt(rec, [&] { p = solve_femto(build_femto_lp(est, g, gF, s.p_tol, s.noise_power)); })) {
        rec.flags[0] = 1.0;
        rec.values[0] = p.sum();
    }
    for (int k = 1; k < 3; ++k) {
        if (attempt(rec, [&] {
                const RobustBounds b =
                    assemble_bounds(est, g, s.psi, k == 1 ? BoundKind::young : BoundKind::proposed);
                for (const auto& w : b.warnings) rec.warnings.push_back(w);
                p = solve_robust(b, gF, s.p_tol, s.noise_power);
            })) {
            rec.flags[static_cast<std::size_t>(k)] = 1.0;
            rec.values[static_cast<std::size_t>(k)] = p.sum();
        }
    }
}

const std::vector<Experiment>& registry() {
    static const std::vector<Experiment> list{
        {"power-compare",
         {{"gamma_M_db", {-3.0, -1.0, 1.0}}, {"gamma_F_db", grid(-4.0, 4.0, 1.0)}},
         {},
         {"feasible_central", "feasible_proposed"},
         {"p_central_w", "p_proposed_w", "p_macro_proposed_w", "p_femto_proposed_w", "macro_iterations",
          "gap_db"},
         {},
         power_compare},
        {"mu-outage",
         {{"gamma_M_db", {-1.0}}, {"xi", {0.0, 0.05, 0.1, 0.2}}},
         {},
         {"feasible"},
         {"outage_rate", "mean_sinr", "min_sinr_db"},
         {},
         mu_outage},
        {"tr-vs-zf",
         {{"N1", {2.0, 4.0}}, {"tx_power_dbm", grid(0.0, 40.0, 2.0)}},
         {"tx_power_dbm"},
         {"feasible"},
         {"sinr_tr", "sinr_zf"},
         [](ScenarioConfig& s) {
             if (s.fixed_fu_distance == 0.0) s.fixed_fu_distance = 15.0;
         },
         tr_vs_zf},
        {"bound-tightness",
         {{"psi", {0.05, 0.1}}},
         {},
         {"young_ge_proposed", "oracle_violation"},
         {"young_w", "proposed_w", "oracle_max_w", "gap_db", "lemma2_signal_w", "probe_signal_w",
          "oracle_min_signal_w"},
         {},
         bound_tightness},
        {"fu-outage",
         {{"gamma_F_db", {2.0}}, {"psi", {0.04}}},
         {},
         {"feasible_nominal", "feasible_young", "feasible_proposed"},
         {"p_nominal_w", "p_young_w", "p_proposed_w", "outage_nominal", "outage_young", "outage_proposed",
          "min_sinr_nominal_db", "min_sinr_young_db", "min_sinr_proposed_db"},
         {},
         fu_outage},
        {"robust-power",
         {{"gamma_F_db", grid(-4.0, 4.0, 1.0)}, {"psi", {0.04}}},
         {},
         {"feasible_nominal", "feasible_young", "feasible_proposed"},
         {"p_nominal_w", "p_young_w", "p_proposed_w"},
         {},
         robust_power},
    };
    return list;
}

const Experiment& find_experiment(const std::string& name) {
    for (const auto& e : registry())
        if (e.name == name) return e;
    throw Error(ErrorKind::config, "unknown experiment: " + name);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "infeasible";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& e : registry()) n.push_back(e.name);
        return n;
    }();
    return names;
}

std::pair<std::string, std::vector<double>> parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    require(eq != std::string::npos && eq > 0 && eq + 1 < text.size(), ErrorKind::config,
            "sweep must look like key=v1,v2,...: " + text);
    std::pair<std::string, std::vector<double>> out{text.substr(0, eq), {}};
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == item.size() && used > 0 && std::isfinite(v), ErrorKind::config,
                "sweep value is not a number: '" + item + "'");
        out.second.push_back(v);
    }
    require(!out.second.empty(), ErrorKind::config, "empty sweep list for " + out.first);
    return out;
}

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("HETNET_TR_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunConfig& config, std::ostream& csv) {
    const Experiment& exp = find_experiment(spec.name);
    const int trials = spec.trials > 0 ? spec.trials : config.harness.trials;
    require(trials >= 1, ErrorKind::config, "trials must be >= 1");
    const std::uint64_t seed = spec.seed_set ? spec.seed : config.scenario.seed;

    ScenarioConfig base = config.scenario;
    if (exp.prepare) exp.prepare(base);

    // Resolve the grid: defaults, with user-supplied keys replacing or extending them.
    Sweep sweep = exp.defaults;
    for (const auto& [key, values] : spec.sweep) {
        ScenarioConfig probe = base;
        const bool extra = std::find(exp.extra_keys.begin(), exp.extra_keys.end(), key) != exp.extra_keys.end();
        require(extra || apply_override(probe, key, values.front()), ErrorKind::config,
                "sweep key '" + key + "' is not a parameter of " + spec.name);
        bool replaced = false;
        for (auto& entry : sweep)
            if (entry.first == key) {
                entry.second = values;
                replaced = true;
            }
        if (!replaced) sweep.emplace_back(key, values);
    }

    std::vector<Point> points(1);
    for (const auto& [key, values] : sweep) {
        std::vector<Point> next;
        for (const auto& p : points)
            for (double v : values) {
                Point q = p;
                q[key] = v;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    std::vector<ScenarioConfig> configs;
    for (const auto& p : points) {
        ScenarioConfig c = base;
        for (const auto& [key, v] : p) apply_override(c, key, v);
        if (p.count("tx_power_dbm"))
            require(p.at("tx_power_dbm") > -100.0 && p.at("tx_power_dbm") < 100.0, ErrorKind::config,
                    "tx_power_dbm out of range");
        c.validate();
        configs.push_back(c);
    }

    const std::size_t np = points.size();
    const std::size_t jobs = np * static_cast<std::size_t>(trials);
    std::vector<Record> records(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs) return;
            const std::size_t pi = k % np;
            const int trial = static_cast<int>(k / np);
            try {
                const Context ctx{configs[pi], config.harness, points[pi], trial, seed, pi};
                exp.trial(ctx, records[k]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(jobs);
            }
        }
    };
    const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(jobs)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<std::string> keys;
    for (const auto& [key, values] : sweep) keys.push_back(key);

    csv << "trial";
    for (const auto& k : keys) csv << ',' << k;
    for (const auto& f : exp.flags) csv << ',' << f;
    for (const auto& v : exp.values) csv << ',' << v;
    csv << '\n';

    ExperimentReport report;
    auto write_keys = [&](const Point& p) {
        for (const auto& k : keys) csv << ',' << fmt(p.at(k));
    };
    for (std::size_t k = 0; k < jobs; ++k) {
        const Record& r = records[k];
        csv << (k / np);
        write_keys(points[k % np]);
        for (double f : r.flags) csv << ',' << fmt(f);
        for (double v : r.values) csv << ',' << fmt(v);
        csv << '\n';
        ++report.rows;
        bool any = exp.flags.empty();
        for (double f : r.flags) any = any || f > 0.0;
        if (any) ++report.feasible_rows;
        report.numerical_failures += r.numerical;
        for (const auto& w : r.warnings) report.warnings.push_back(w);
    }
    for (std::size_t pi = 0; pi < np; ++pi) {
        csv << "summary";
        write_keys(points[pi]);
        for (std::size_t f = 0; f < exp.flags.size(); ++f) {
            double s = 0.0;
            for (int t = 0; t < trials; ++t) s += records[static_cast<std::size_t>(t) * np + pi].flags[f];
            csv << ',' << fmt(s / trials);
        }
        for (std::size_t v = 0; v < exp.values.size(); ++v) {
            double s = 0.0;
            int n = 0;
            for (int t = 0; t < trials; ++t) {
                const double x = records[static_cast<std::size_t>(t) * np + pi].values[v];
                if (std::isnan(x)) continue;
                s += x;
                ++n;
            }
            csv << ',' << fmt(n > 0 ? s / n : kMissing);
        }
        csv << '\n';
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunConfig& config) {
    std::ostringstream buffer;
    ExperimentReport report = run_experiment(spec, config, buffer);
    std::ofstream out(spec.output_path, std::ios::binary);
    require(out.good(), ErrorKind::io, "cannot write output file: " + spec.output_path);
    out << buffer.str();
    require(out.good(), ErrorKind::io, "write failed: " + spec.output_path);
    return report;
}

}  // namespace hetnet
