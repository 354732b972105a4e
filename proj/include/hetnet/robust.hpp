#pragma once

#include <string>
#include <vector>

#include "hetnet/power.hpp"

namespace hetnet {

// Per-antenna bounded estimation error: h_est = h + e with ||e||^2 <= psi ||h||^2.
// Every true channel then lies in the ball ||h|| <= ||h_est|| / (1 - sqrt(psi)).

struct VirtualChannel {
    CVec h_star;    // maximizer of ||g * h|| over the ball
    CVec phi_star;  // unit direction of h_star
    double lam = 0.0;  // top eigenvalue of the scaled Gram matrix
};

/// |sum_i (g_i * h_i)[L-1]|^2 / (1 - sqrt(psi))^2, watts per unit power.
double worst_signal_lower(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi);

/// (sum_i ||h_i|| ||g_i||_1)^2 / (1 - sqrt(psi))^2.
double young_upper(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi);

VirtualChannel virtual_channel(const CVec& g_hat, const CVec& h_hat, double psi, double tol = 1e-10);

/// sum_i ||w_i||^2 + |sum_{i != i'} w_i^H w_i'| with w_i = g_i * h_star_i.
double proposed_upper(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi);

enum class BoundKind { proposed, young };

struct RobustBounds {
    RVec pl_sig_coeff;   // per FU
    RVec pu_isi_coeff;   // per FU, clamped at 0
    RMat pu_co_coeff;    // (j, j'): coefficient on p_j' at FU j, zero diagonal
    RVec omega_coeff;    // objective weights over the FBS -> MU links
    RVec young_norm;     // young_upper of each own link, for reference
    std::vector<bool> isi_clamped;
    std::vector<std::string> warnings;
    BoundKind kind = BoundKind::proposed;
    double psi = 0.0;
};

/// Worst-case coefficients of the femto problem from estimated channels and
/// the TR beams designed on them. With psi = 0 the uncertainty set is a single
/// point and the nominal coefficients are returned unchanged.
RobustBounds assemble_bounds(const ChannelSet& channels_est, const CirArray& g_hat, double psi,
                             BoundKind kind = BoundKind::proposed);

FemtoLp robust_lp(const RobustBounds& bounds, const RVec& gamma_F, double p_tol, double noise);

PowerVector solve_robust(const RobustBounds& bounds, const RVec& gamma_F, double p_tol, double noise);

struct OracleResult {
    double max_total = 0.0;   // largest ||sum_i g_i * h_i||^2 found
    double min_signal = 0.0;  // smallest |sum_i (g_i * h_i)[L-1]|^2 found
    double probe_signal = 0.0;  // signal at h = h_est / (1 - sqrt(psi))
    int probes = 0;
};

/// Searches the exact feasible set {h : ||h_est - h||^2 <= psi ||h||^2} (per
/// antenna) by random directions at maximal radius plus projected gradient
/// steps, for the extremes of the total received energy and of the sampled tap.
OracleResult worst_case_oracle(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi,
                               int n_probes, int n_ascent, Rng& rng);

}  // namespace hetnet
