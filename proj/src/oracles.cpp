#include "hetnet/oracles.hpp"

#include <cmath>
#include <limits>

namespace hetnet {

FixedPointResult lp_fixed_point_oracle(const RMat& F, const RVec& v, double tol, int max_iter) {
    require(F.rows() == F.cols() && F.rows() == v.size(), ErrorKind::dimension,
            "lp_fixed_point_oracle: inconsistent sizes");
    require((F.array() >= 0).all() && (v.array() >= 0).all(), ErrorKind::domain,
            "lp_fixed_point_oracle: F and v must be nonnegative");
    FixedPointResult r;
    r.p = RVec::Zero(v.size());
    double last_step = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 1; it <= max_iter; ++it) {
        RVec next = F * r.p + v;
        const double step = (next - r.p).norm();
        r.p = std::move(next);
        r.iterations = it;
        if (step <= tol * r.p.norm()) {
            r.converged = true;
            return r;
        }
        if (!std::isfinite(step)) {
            r.diverged = true;
            return r;
        }
        // A convergent iteration has geometrically shrinking increments.
        growth = step >= last_step ? growth + 1 : 0;
        if (growth >= 1000) {
            r.diverged = true;
            return r;
        }
        last_step = step;
    }
    return r;
}

KktResult macro_kkt_oracle(const RVec& delta, const RVec& nabla, const RVec& gamma, const RVec& caps) {
    const Eigen::Index N = delta.size();
    require(nabla.size() == N && gamma.size() == N && caps.size() == N, ErrorKind::dimension,
            "macro_kkt_oracle: inconsistent sizes");
    KktResult r{RVec(N), std::vector<bool>(static_cast<std::size_t>(N), true)};
    for (Eigen::Index n = 0; n < N; ++n) {
        if (gamma(n) * delta(n) >= 1.0) {
            r.p(n) = caps(n);
            r.feasible[static_cast<std::size_t>(n)] = false;
            continue;
        }
        const double p = nabla(n) / (1.0 / gamma(n) - delta(n));
        if (p > caps(n)) {
            r.p(n) = caps(n);
            r.feasible[static_cast<std::size_t>(n)] = false;
        } else {
            r.p(n) = p;
        }
    }
    return r;
}

}  // namespace hetnet
