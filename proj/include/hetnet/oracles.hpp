#pragma once

#include <vector>

#include "hetnet/linops.hpp"

namespace hetnet {

struct FixedPointResult {
    RVec p;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
};

/// Iterates p <- F p + v from p = 0 until ||dp|| <= tol ||p||. Divergence is
/// declared when the iterate norm grows over 1000 consecutive steps without
/// the increments shrinking.
FixedPointResult lp_fixed_point_oracle(const RMat& F, const RVec& v, double tol = 1e-12, int max_iter = 1000000);

struct KktResult {
    RVec p;
    std::vector<bool> feasible;
};

/// Per-user closed form of the macro problem: p_n = nabla_n / (1/gamma_n - Delta_n),
/// replaced by cap_n and flagged when it exceeds the cap or gamma_n Delta_n >= 1.
KktResult macro_kkt_oracle(const RVec& delta, const RVec& nabla, const RVec& gamma, const RVec& caps);

}  // namespace hetnet
