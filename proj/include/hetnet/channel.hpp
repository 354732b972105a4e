#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hetnet/linops.hpp"

namespace hetnet {

using Rng = std::mt19937_64;

/// Channel impulse response of one transmit antenna -> user link.
using Cir = CVec;

/// Tapped-delay-line power profile. Tap index equals row index; the delay
/// column is carried for reference only.
struct TapProfile {
    std::string name;
    std::vector<double> delays_ns;
    std::vector<double> powers_db;

    int taps() const { return static_cast<int>(powers_db.size()); }
    /// Per-tap variance weights, 0 dB -> 1.0.
    RVec linear_powers() const;
    void validate() const;
};

namespace profiles {
TapProfile itu_indoor_office();
TapProfile itu_vehicular();
TapProfile itu_outdoor_to_indoor();
}  // namespace profiles

/// Reads a JSON catalog: {"profiles": [{"name", "delays_ns", "powers_db"}, ...]}.
std::vector<TapProfile> load_tap_profiles(const std::string& path);
const TapProfile& find_profile(const std::vector<TapProfile>& catalog, const std::string& name);

/// Pathloss and profile of one link family.
struct LinkModel {
    TapProfile profile;
    double exponent = 3.0;
    double gain = 1.0;  // extra linear multiplier on every tap variance
};

struct ChannelModel {
    LinkModel macro;     // MBS -> MU      (h0)
    LinkModel femto;     // FBS -> FU      (h1)
    LinkModel down;      // MBS -> FU      (h01)
    LinkModel up;        // FBS -> MU      (h10)

    static ChannelModel standard();
};

struct MacroSchedule {
    double a = 10.0;
    double b = 10.0;
    int max_iter = 50000;
};

struct ScenarioConfig {
    int M0 = 4;
    int M1 = 4;
    int N0 = 2;
    int N1 = 2;
    int L = 6;
    double gamma_M = 1.2589254117941673;  // linear, 1 dB
    double gamma_F = 1.5848931924611136;  // linear, 2 dB
    double p_tol = 1e-4;                  // W, -10 dBm
    double noise_power = 1e-12;           // W
    double macro_radius = 300.0;
    double femto_radius = 30.0;
    double fbs_distance = 100.0;
    double psi = 0.04;
    double xi = 0.0;
    std::uint64_t seed = 1;
    /// When > 0 every FU is placed at exactly this distance from the FBS.
    double fixed_fu_distance = 0.0;
    MacroSchedule schedule;
    ChannelModel model = ChannelModel::standard();

    /// Throws Error(config) naming the first violated invariant.
    void validate() const;
};

/// Distances in meters. d_10n (FBS -> MU) is derived alongside the others.
struct Geometry {
    std::vector<double> d_0n;
    std::vector<double> d_1j;
    std::vector<double> d_01j;
    std::vector<double> d_10n;
    double d_mf = 0.0;
};

/// Row-major table of CIRs indexed (transmit antenna, user).
class CirArray {
public:
    CirArray() = default;
    CirArray(int antennas, int users, int L)
        : antennas_(antennas), users_(users), data_(static_cast<std::size_t>(antennas * users), Cir::Zero(L)) {}

    int antennas() const { return antennas_; }
    int users() const { return users_; }
    int taps() const { return data_.empty() ? 0 : static_cast<int>(data_.front().size()); }

    Cir& operator()(int antenna, int user) { return data_[index(antenna, user)]; }
    const Cir& operator()(int antenna, int user) const { return data_[index(antenna, user)]; }

    /// All antennas' CIRs towards one user.
    std::vector<Cir> user(int u) const;

    bool operator==(const CirArray& other) const;

private:
    std::size_t index(int a, int u) const { return static_cast<std::size_t>(a * users_ + u); }

    int antennas_ = 0;
    int users_ = 0;
    std::vector<Cir> data_;
};

struct ChannelSet {
    CirArray h0;   // M0 x N0
    CirArray h1;   // M1 x N1
    CirArray h10;  // M1 x N0
    CirArray h01;  // M0 x N1

    int L() const { return h0.taps(); }
};

Geometry place_nodes(const ScenarioConfig& config, Rng& rng);

Cir draw_cir(const TapProfile& profile, double distance, double exponent, int L, Rng& rng,
             double gain = 1.0);

ChannelSet draw_channel_set(const ScenarioConfig& config, const Geometry& geometry, Rng& rng);

enum class PerturbMode { worst_aligned, worst_anti_aligned, uniform_ball };

struct Perturbed {
    Cir h_est;
    Cir e;
};

/// h_est = h + e with ||e||^2 <= psi ||h||^2.
Perturbed perturb_cir(const Cir& h_true, double psi, PerturbMode mode, Rng& rng);

/// Draws a true CIR uniformly from {h : ||h_est - h||^2 <= psi ||h||^2}, the set
/// of channels that could have produced the estimate h_est.
Cir sample_true_given_estimate(const Cir& h_est, double psi, Rng& rng);

/// Deterministic per-trial stream derived from (seed, stream id).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double linear_to_db(double x);
double watts_to_dbm(double w);

}  // namespace hetnet
