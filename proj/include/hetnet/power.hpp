#pragma once

#include <string>
#include <vector>

#include "hetnet/sinr.hpp"

namespace hetnet {

/// Femto power subproblem in the form p >= D B p + D z, minimizing eta_hat^T p.
struct FemtoLp {
    RVec eta_hat;  // objective weights: cross power towards the MUs per unit p_j
    RVec eta;      // eta_hat / ||eta_hat||
    RMat B;        // B(j, k): interference power at FU j per unit p_k, zero diagonal
    RVec D;        // diagonal of D, gamma_j / phi_j
    RVec phi;      // sig_j - gamma_j * isi_j per unit power
    RVec z;        // P_tol + noise
    RVec gamma;
    double rho = 0.0;  // spectral radius of D B

    int users() const { return static_cast<int>(phi.size()); }
};

/// Assembles the LP from per-unit-power coefficients. Throws Error(infeasible)
/// if some phi_j <= 0.
FemtoLp make_femto_lp(const RVec& sig, const RVec& isi, const RMat& B, const RVec& eta_hat, const RVec& gamma,
                      double p_tol, double noise);

FemtoLp build_femto_lp(const ChannelSet& channels, const CirArray& g, const RVec& gamma_F, double p_tol,
                       double noise);

/// Weighted closed form in the variables diag(eta) p. Falls back to unit
/// weights when some eta_hat_j is zero.
PowerVector solve_femto(const FemtoLp& lp);

/// (I - D B)^{-1} D z.
PowerVector solve_femto_simplified(const FemtoLp& lp);

/// Cross-tier power the femtocell causes at each MU; the only quantity sent to the MBS.
RVec cross_report(const ChannelSet& channels, const CirArray& g, const PowerVector& p1);

/// Per-MU coefficients of the macro problem for unit-norm ZF beams.
struct MacroCoefficients {
    RVec main;       // |(sum_m u_mn * h_mn)[alpha]|^2
    RVec delta;      // (own ISI + leakage to other MUs) / main
    RVec nabla;      // (cross report + noise) / main
    RMat cap_coeff;  // (n, j): ||sum_m u_mn * h01_mj||^2

    int users() const { return static_cast<int>(main.size()); }
};

MacroCoefficients macro_coefficients(const ChannelSet& channels, const CirArray& u, const std::vector<int>& alpha,
                                     const RVec& cross_star, double noise);

struct MacroDual {
    RVec delta;
    RVec nabla;
    RVec xi;       // log p
    RVec mu;       // SINR multipliers
    RMat lambda;   // (n, j) interference-cap multipliers
    RVec X1;       // SINR residuals
    RMat X2;       // cap residuals, watts
    int iterations = 0;
};

struct MacroSolution {
    PowerVector p;
    MacroDual dual;
    std::vector<bool> feasible;  // per MU
    bool converged = false;
    std::string violation;       // first violated constraint, empty when all feasible

    bool all_feasible() const;
    /// Throws Error(infeasible) naming the violated constraint.
    void require_feasible() const;
};

/// Dual subgradient solution of the log-transformed macro problem.
///
/// Every (MU n, FU j) pair gets the cap cap_coeff(n, j) p_n <= p_tol / N0, so
/// the macro tier never pushes more than p_tol onto any FU.
/// Users whose minimal SINR-feasible power already exceeds an interference
/// cap are not iterated: their power is set to the cap and flagged.
/// Throws ConvergenceError when max_iter is hit.
MacroSolution solve_macro(const MacroCoefficients& coeffs, const RVec& gamma, double p_tol,
                          const MacroSchedule& schedule = {});

MacroSolution solve_macro(const ChannelSet& channels, const CirArray& u, const std::vector<int>& alpha,
                          const RVec& gamma_M, double p_tol, const RVec& cross_star, double noise,
                          const MacroSchedule& schedule = {});

struct AllocationResult {
    PowerVector p0;
    PowerVector p1;
    bool feasible = false;
    RVec sinr_mu;
    RVec sinr_fu;
    RVec cross_report;   // N0 scalars sent over the backhaul (proposed scheme only)
    int iterations = 0;
    double total_power = 0.0;
    BeamformerSet beams;
};

/// Joint linear system p >= F p + v over [p0; p1].
struct CoupledLp {
    RMat F;
    RVec v;
    double rho = 0.0;
};

CoupledLp build_coupled_lp(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                           const RVec& gamma_F, double noise);

/// Centralized minimum-power allocation with every SINR constraint active.
AllocationResult solve_centralized(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                                   const RVec& gamma_F, double noise);

/// Femto-first pipeline: TR -> femto LP -> cross report -> ZF -> macro dual.
AllocationResult solve_proposed(const ChannelSet& channels, const RVec& gamma_M, const RVec& gamma_F,
                                double p_tol, double noise, const MacroSchedule& schedule = {});

/// Same, reusing precomputed beams.
AllocationResult solve_proposed(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                                const RVec& gamma_F, double p_tol, double noise,
                                const MacroSchedule& schedule = {});

/// Fills sinr_mu / sinr_fu / total_power from the true breakdowns.
void evaluate_allocation(const ChannelSet& channels, double noise, AllocationResult& result);

}  // namespace hetnet
