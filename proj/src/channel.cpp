#include "hetnet/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace hetnet {

namespace {

constexpr double kMinDistance = 1.0;  // meters

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point uniform_in_disc(Point center, double radius, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

Point on_circle(Point center, double radius, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return {center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)};
}

CVec complex_gaussian(int n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec v(n);
    for (int i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = {re, im};
    }
    return v;
}

CVec uniform_direction(int n, Rng& rng) {
    CVec d = complex_gaussian(n, rng);
    double nrm = d.norm();
    while (nrm == 0.0) {
        d = complex_gaussian(n, rng);
        nrm = d.norm();
    }
    return d / nrm;
}

// Radius fraction for a uniform draw inside a ball in C^n (2n real dims).
double ball_radius_fraction(int n, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return std::pow(unit(rng), 1.0 / (2.0 * n));
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

RVec TapProfile::linear_powers() const {
    RVec w(taps());
    for (int l = 0; l < taps(); ++l) w(l) = db_to_linear(powers_db[static_cast<std::size_t>(l)]);
    return w;
}

void TapProfile::validate() const {
    require(!powers_db.empty(), ErrorKind::config, "tap profile '" + name + "' has no taps");
    require(delays_ns.size() == powers_db.size(), ErrorKind::config,
            "tap profile '" + name + "': delay and power columns differ in length");
    require(delays_ns.front() == 0.0, ErrorKind::config,
            "tap profile '" + name + "': first delay must be 0");
    require(powers_db.front() == 0.0, ErrorKind::config,
            "tap profile '" + name + "': first tap power must be 0 dB");
    for (std::size_t l = 1; l < delays_ns.size(); ++l)
        require(delays_ns[l] > delays_ns[l - 1], ErrorKind::config,
                "tap profile '" + name + "': delays must be strictly increasing");
}

namespace profiles {

TapProfile itu_indoor_office() {
    return {"itu_indoor_office", {0, 50, 100, 170, 290, 310}, {0, -3, -10, -18, -26, -32}};
}

TapProfile itu_vehicular() {
    return {"itu_vehicular", {0, 310, 710, 1090, 1730, 2510}, {0, -1, -9, -10, -15, -20}};
}

TapProfile itu_outdoor_to_indoor() {
    return {"itu_outdoor_to_indoor", {0, 110, 190, 410}, {0, -9.7, -19.2, -22.8}};
}

}  // namespace profiles

std::vector<TapProfile> load_tap_profiles(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open tap profile catalog: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, "malformed tap profile catalog " + path + ": " + e.what());
    }
    std::vector<TapProfile> out;
    try {
        for (const auto& p : doc.at("profiles")) {
            TapProfile prof{p.at("name").get<std::string>(),
                            p.at("delays_ns").get<std::vector<double>>(),
                            p.at("powers_db").get<std::vector<double>>()};
            prof.validate();
            out.push_back(std::move(prof));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, "malformed tap profile catalog " + path + ": " + e.what());
    }
    return out;
}

const TapProfile& find_profile(const std::vector<TapProfile>& catalog, const std::string& name) {
    for (const auto& p : catalog)
        if (p.name == name) return p;
    throw Error(ErrorKind::config, "unknown tap profile: " + name);
}

ChannelModel ChannelModel::standard() {
    return {{profiles::itu_vehicular(), 4.0, 1.0},
            {profiles::itu_indoor_office(), 3.0, 1.0},
            {profiles::itu_outdoor_to_indoor(), 3.5, 1.0},
            {profiles::itu_outdoor_to_indoor(), 3.5, 1.0}};
}

void ScenarioConfig::validate() const {
    auto check = [](bool ok, const std::string& what) { require(ok, ErrorKind::config, what); };
    check(M0 >= 1 && M1 >= 1 && N0 >= 1 && N1 >= 1 && L >= 1, "all antenna, user and tap counts must be >= 1");
    check(M0 * L >= (2 * L - 1) * N0,
          "M0*L must be >= (2L-1)*N0 for the macro zero-forcing right inverse to exist");
    check(gamma_M > 0 && gamma_F > 0, "SINR thresholds must be positive");
    check(p_tol > 0, "tolerable cross interference must be positive");
    check(noise_power > 0, "noise power must be positive");
    check(psi >= 0 && psi < 1, "psi must lie in [0, 1)");
    check(xi >= 0 && xi < 1, "xi must lie in [0, 1)");
    check(macro_radius > 0 && femto_radius > 0 && fbs_distance > 0, "radii must be positive");
    check(fbs_distance + femto_radius <= macro_radius, "femtocell must lie inside the macrocell");
    check(fixed_fu_distance >= 0 && fixed_fu_distance <= femto_radius,
          "fixed FU distance must lie within the femtocell radius");
    check(schedule.a > 0 && schedule.b > 0 && schedule.max_iter > 0, "invalid macro step schedule");
    for (const LinkModel* lm : {&model.macro, &model.femto, &model.down, &model.up}) {
        lm->profile.validate();
        check(lm->profile.taps() <= L, "tap profile '" + lm->profile.name + "' is longer than L");
        check(lm->exponent > 0 && lm->gain >= 0, "invalid pathloss exponent or gain");
    }
}

std::vector<Cir> CirArray::user(int u) const {
    std::vector<Cir> out;
    out.reserve(static_cast<std::size_t>(antennas_));
    for (int a = 0; a < antennas_; ++a) out.push_back((*this)(a, u));
    return out;
}

bool CirArray::operator==(const CirArray& other) const {
    if (antennas_ != other.antennas_ || users_ != other.users_ || data_.size() != other.data_.size())
        return false;
    for (std::size_t k = 0; k < data_.size(); ++k)
        if (data_[k].size() != other.data_[k].size() || data_[k] != other.data_[k]) return false;
    return true;
}

Geometry place_nodes(const ScenarioConfig& config, Rng& rng) {
    const Point mbs{0.0, 0.0};
    const Point fbs = on_circle(mbs, config.fbs_distance, rng);

    Geometry g;
    g.d_mf = distance(mbs, fbs);
    for (int n = 0; n < config.N0; ++n) {
        Point mu;
        do {
            mu = uniform_in_disc(mbs, config.macro_radius, rng);
        } while (distance(mu, mbs) < kMinDistance || distance(mu, fbs) < kMinDistance);
        g.d_0n.push_back(distance(mu, mbs));
        g.d_10n.push_back(distance(mu, fbs));
    }
    for (int j = 0; j < config.N1; ++j) {
        Point fu;
        if (config.fixed_fu_distance > 0) {
            fu = on_circle(fbs, config.fixed_fu_distance, rng);
        } else {
            do {
                fu = uniform_in_disc(fbs, config.femto_radius, rng);
            } while (distance(fu, fbs) < kMinDistance);
        }
        g.d_1j.push_back(distance(fu, fbs));
        g.d_01j.push_back(distance(fu, mbs));
    }
    return g;
}

Cir draw_cir(const TapProfile& profile, double dist, double exponent, int L, Rng& rng, double gain) {
    require(dist > 0, ErrorKind::domain, "draw_cir: distance must be positive");
    require(profile.taps() <= L, ErrorKind::dimension, "draw_cir: profile longer than L");
    std::normal_distribution<double> normal(0.0, 1.0);
    const RVec w = profile.linear_powers();
    const double pathloss = gain / std::pow(dist, exponent);
    Cir h = Cir::Zero(L);
    for (int l = 0; l < profile.taps(); ++l) {
        const double sd = std::sqrt(0.5 * w(l) * pathloss);
        const double re = normal(rng);
        const double im = normal(rng);
        h(l) = {sd * re, sd * im};
    }
    return h;
}

ChannelSet draw_channel_set(const ScenarioConfig& config, const Geometry& geometry, Rng& rng) {
    const int L = config.L;
    const auto& mdl = config.model;
    ChannelSet cs{CirArray(config.M0, config.N0, L), CirArray(config.M1, config.N1, L),
                  CirArray(config.M1, config.N0, L), CirArray(config.M0, config.N1, L)};
    auto draw = [&](const LinkModel& lm, double d) {
        return draw_cir(lm.profile, d, lm.exponent, L, rng, lm.gain);
    };
    for (int m = 0; m < config.M0; ++m)
        for (int n = 0; n < config.N0; ++n) cs.h0(m, n) = draw(mdl.macro, geometry.d_0n[n]);
    for (int i = 0; i < config.M1; ++i)
        for (int j = 0; j < config.N1; ++j) cs.h1(i, j) = draw(mdl.femto, geometry.d_1j[j]);
    for (int m = 0; m < config.M0; ++m)
        for (int j = 0; j < config.N1; ++j) cs.h01(m, j) = draw(mdl.down, geometry.d_01j[j]);
    for (int i = 0; i < config.M1; ++i)
        for (int n = 0; n < config.N0; ++n) cs.h10(i, n) = draw(mdl.up, geometry.d_10n[n]);
    return cs;
}

Perturbed perturb_cir(const Cir& h_true, double psi, PerturbMode mode, Rng& rng) {
    require(psi >= 0 && psi < 1, ErrorKind::domain, "perturb_cir: psi must lie in [0, 1)");
    const double bound = psi * h_true.squaredNorm();
    Cir e;
    switch (mode) {
        case PerturbMode::worst_aligned:
            e = std::sqrt(psi) * h_true;
            break;
        case PerturbMode::worst_anti_aligned:
            e = -std::sqrt(psi) * h_true;
            break;
        case PerturbMode::uniform_ball: {
            const int n = static_cast<int>(h_true.size());
            const CVec d = uniform_direction(n, rng);
            e = (std::sqrt(bound) * ball_radius_fraction(n, rng)) * d;
            break;
        }
    }
    while (e.squaredNorm() > bound) e *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    return {h_true + e, e};
}

Cir sample_true_given_estimate(const Cir& h_est, double psi, Rng& rng) {
    require(psi >= 0 && psi < 1, ErrorKind::domain, "sample_true_given_estimate: psi must lie in [0, 1)");
    // ||h_est - h||^2 <= psi ||h||^2 is the ball |h - c| <= R below.
    const int n = static_cast<int>(h_est.size());
    const Cir center = h_est / (1.0 - psi);
    const double radius = std::sqrt(psi) * h_est.norm() / (1.0 - psi);
    Cir h = center + (radius * ball_radius_fraction(n, rng)) * uniform_direction(n, rng);
    while ((h_est - h).squaredNorm() > psi * h.squaredNorm())
        h = center + (1.0 - 4.0 * std::numeric_limits<double>::epsilon()) * (h - center);
    return h;
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x68657400u};
    return Rng(seq);
}

}  // namespace hetnet
