#include "hetnet/power.hpp"

#include <cmath>
#include <limits>

namespace hetnet {

namespace {

RVec solve_linear(const RMat& A, const RVec& b) { return A.partialPivLu().solve(b); }

void check_nonnegative(const RVec& p, const char* what) {
    for (Eigen::Index k = 0; k < p.size(); ++k)
        if (!(p(k) >= 0.0) || !std::isfinite(p(k)))
            throw Error(ErrorKind::numerical, std::string(what) + ": closed form produced an invalid entry");
}

}  // namespace

FemtoLp make_femto_lp(const RVec& sig, const RVec& isi, const RMat& B, const RVec& eta_hat, const RVec& gamma,
                      double p_tol, double noise) {
    const Eigen::Index N = sig.size();
    require(isi.size() == N && B.rows() == N && B.cols() == N && eta_hat.size() == N && gamma.size() == N,
            ErrorKind::dimension, "make_femto_lp: inconsistent sizes");
    FemtoLp lp;
    lp.gamma = gamma;
    lp.phi = sig - gamma.cwiseProduct(isi);
    for (Eigen::Index j = 0; j < N; ++j)
        if (!(lp.phi(j) > 0.0))
            throw Error(ErrorKind::infeasible,
                        "femto: SINR target of FU " + std::to_string(j + 1) + " unreachable at any power");
    lp.B = B;
    lp.B.diagonal().setZero();
    lp.D = gamma.cwiseQuotient(lp.phi);
    lp.z = RVec::Constant(N, p_tol + noise);
    lp.eta_hat = eta_hat;
    const double en = eta_hat.norm();
    lp.eta = en > 0.0 ? RVec(eta_hat / en) : RVec::Zero(N);
    lp.rho = spectral_radius(RMat(lp.D.asDiagonal() * lp.B));
    return lp;
}

FemtoLp build_femto_lp(const ChannelSet& channels, const CirArray& g, const RVec& gamma_F, double p_tol,
                       double noise) {
    const int N1 = channels.h1.users();
    const int N0 = channels.h10.users();
    const int centre = channels.L() - 1;
    RVec sig(N1), isi(N1), eta_hat = RVec::Zero(N1);
    RMat B = RMat::Zero(N1, N1);
    for (int j = 0; j < N1; ++j) {
        const CVec y = response(g, j, channels.h1, j);
        sig(j) = std::norm(y(centre));
        isi(j) = std::max(y.squaredNorm() - sig(j), 0.0);
        for (int k = 0; k < N1; ++k)
            if (k != j) B(j, k) = response(g, k, channels.h1, j).squaredNorm();
        for (int n = 0; n < N0; ++n) eta_hat(j) += response(g, j, channels.h10, n).squaredNorm();
    }
    return make_femto_lp(sig, isi, B, eta_hat, gamma_F, p_tol, noise);
}

PowerVector solve_femto(const FemtoLp& lp) {
    if (!(lp.rho < 1.0))
        throw Error(ErrorKind::infeasible,
                    "femto: spectral radius " + std::to_string(lp.rho) + " >= 1, no nonnegative solution");
    const Eigen::Index N = lp.phi.size();
    RVec w = lp.eta;
    if (!(w.array() > 0.0).all()) w = RVec::Ones(N);
    // q = diag(w) p turns p >= DBp + Dz into q >= diag(w) D B diag(w)^-1 q + diag(w) D z.
    const RMat A = w.cwiseProduct(lp.D).asDiagonal() * lp.B * w.cwiseInverse().asDiagonal();
    const RVec rhs = w.cwiseProduct(lp.D.cwiseProduct(lp.z));
    const RVec q = solve_linear(RMat::Identity(N, N) - A, rhs);
    RVec p = q.cwiseQuotient(w);
    check_nonnegative(p, "solve_femto");
    return p;
}

PowerVector solve_femto_simplified(const FemtoLp& lp) {
    if (!(lp.rho < 1.0))
        throw Error(ErrorKind::infeasible, "femto: spectral radius >= 1, no nonnegative solution");
    const Eigen::Index N = lp.phi.size();
    const RMat DB = lp.D.asDiagonal() * lp.B;
    RVec p = solve_linear(RMat::Identity(N, N) - DB, lp.D.cwiseProduct(lp.z));
    check_nonnegative(p, "solve_femto_simplified");
    return p;
}

RVec cross_report(const ChannelSet& channels, const CirArray& g, const PowerVector& p1) {
    const int N0 = channels.h10.users();
    const int N1 = channels.h1.users();
    require(p1.size() == N1, ErrorKind::dimension, "cross_report: power vector length mismatch");
    RVec out = RVec::Zero(N0);
    for (int n = 0; n < N0; ++n)
        for (int j = 0; j < N1; ++j) out(n) += p1(j) * response(g, j, channels.h10, n).squaredNorm();
    return out;
}

MacroCoefficients macro_coefficients(const ChannelSet& channels, const CirArray& u, const std::vector<int>& alpha,
                                     const RVec& cross_star, double noise) {
    const int N0 = channels.h0.users();
    const int N1 = channels.h01.users();
    require(static_cast<int>(alpha.size()) == N0 && cross_star.size() == N0, ErrorKind::dimension,
            "macro_coefficients: inconsistent sizes");
    require((cross_star.array() >= 0.0).all(), ErrorKind::domain, "macro_coefficients: negative cross report");
    MacroCoefficients c{RVec(N0), RVec(N0), RVec(N0), RMat(N0, N1)};
    for (int n = 0; n < N0; ++n) {
        const CVec y = response(u, n, channels.h0, n);
        const int a = alpha[static_cast<std::size_t>(n)];
        require(a >= 0 && a < y.size(), ErrorKind::domain, "macro_coefficients: tap out of range");
        const double main = std::norm(y(a));
        if (!(main > 0.0))
            throw Error(ErrorKind::infeasible, "macro: MU " + std::to_string(n + 1) + " receives no signal");
        double leak = std::max(y.squaredNorm() - main, 0.0);
        for (int k = 0; k < N0; ++k)
            if (k != n) leak += response(u, n, channels.h0, k).squaredNorm();
        c.main(n) = main;
        c.delta(n) = leak / main;
        c.nabla(n) = (cross_star(n) + noise) / main;
        for (int j = 0; j < N1; ++j) c.cap_coeff(n, j) = response(u, n, channels.h01, j).squaredNorm();
    }
    return c;
}

bool MacroSolution::all_feasible() const {
    for (bool f : feasible)
        if (!f) return false;
    return true;
}

void MacroSolution::require_feasible() const {
    if (!all_feasible()) throw Error(ErrorKind::infeasible, "macro: " + violation);
}

MacroSolution solve_macro(const MacroCoefficients& coeffs, const RVec& gamma, double p_tol,
                          const MacroSchedule& schedule) {
    const int N0 = coeffs.users();
    const int N1 = static_cast<int>(coeffs.cap_coeff.cols());
    require(gamma.size() == N0, ErrorKind::dimension, "solve_macro: threshold vector length mismatch");
    require(p_tol > 0.0, ErrorKind::domain, "solve_macro: P_tol must be positive");

    // Each FU tolerates p_tol in total, shared evenly by the N0 macro beams.
    const double budget = p_tol / N0;

    MacroSolution sol;
    sol.p = RVec::Zero(N0);
    sol.feasible.assign(static_cast<std::size_t>(N0), true);
    MacroDual& d = sol.dual;
    d.delta = coeffs.delta;
    d.nabla = coeffs.nabla;
    d.xi = RVec::Zero(N0);
    d.mu = RVec::Zero(N0);
    d.lambda = RMat::Zero(N0, N1);
    d.X1 = RVec::Zero(N0);
    d.X2 = RMat::Zero(N0, N1);
    sol.converged = true;

    for (int n = 0; n < N0; ++n) {
        const double delta = coeffs.delta(n);
        const double nabla = coeffs.nabla(n);
        const double g = gamma(n);
        double cap = std::numeric_limits<double>::infinity();
        int cap_j = -1;
        for (int j = 0; j < N1; ++j) {
            if (coeffs.cap_coeff(n, j) <= 0.0) continue;
            const double cj = budget / coeffs.cap_coeff(n, j);
            if (cj < cap) {
                cap = cj;
                cap_j = j;
            }
        }

        auto finish = [&](double p) {
            sol.p(n) = p;
            d.xi(n) = std::log(p);
            d.X1(n) = std::log(g * (delta + nabla / p));
            for (int j = 0; j < N1; ++j) d.X2(n, j) = coeffs.cap_coeff(n, j) * p - budget;
        };

        // Analytic feasibility screen.
        if (!(g * delta < 1.0)) {
            sol.feasible[static_cast<std::size_t>(n)] = false;
            if (sol.violation.empty())
                sol.violation = "SINR target of MU " + std::to_string(n + 1) + " unreachable (gamma*Delta >= 1)";
            finish(std::isfinite(cap) ? cap : std::numeric_limits<double>::max());
            continue;
        }
        const double p_min = g * nabla / (1.0 - g * delta);
        if (p_min > cap) {
            sol.feasible[static_cast<std::size_t>(n)] = false;
            if (sol.violation.empty())
                sol.violation = "interference cap towards FU " + std::to_string(cap_j + 1) + " violated by MU " +
                                std::to_string(n + 1) + " (needs " + std::to_string(p_min) + " W, cap " +
                                std::to_string(cap) + " W)";
            finish(cap);
            continue;
        }

        // Normalized units: p = nabla * y, caps b_j y <= 1.
        RVec b(N1);
        for (int j = 0; j < N1; ++j) b(j) = coeffs.cap_coeff(n, j) * nabla / budget;
        double mu = 1.0;
        RVec lambda = RVec::Zero(N1);
        double y = 0.0;
        double x1 = 0.0;
        RVec x2(N1);
        bool done = false;
        int t = 0;
        for (; t < schedule.max_iter; ++t) {
            const double K = 1.0 + lambda.dot(b);
            const double r = mu / K;
            y = 2.0 * r / (1.0 + std::sqrt(1.0 + 4.0 * delta * r));
            x1 = std::log(g * (delta + 1.0 / y));
            x2 = b * y - RVec::Ones(N1);
            bool slack_ok = true;
            for (int j = 0; j < N1; ++j)
                if (x2(j) > 1e-8 || (lambda(j) > 0.0 && lambda(j) * x2(j) < -1e-8)) slack_ok = false;
            if (std::abs(x1) <= 1e-6 && slack_ok) {
                done = true;
                break;
            }
            const double s = std::min(1.0, schedule.a / (schedule.b + t));
            // Step size normalized by the local curvature |dX1/dmu|.
            const double curvature = 1.0 / (y * (delta * y + 1.0) * K * (2.0 * delta * y + 1.0));
            const double next = mu + s * x1 / curvature;
            mu = std::max(next, 1e-3 * mu);
            for (int j = 0; j < N1; ++j) lambda(j) = std::max(0.0, lambda(j) + s * x2(j));
        }
        d.iterations = std::max(d.iterations, t);
        d.mu(n) = mu;
        for (int j = 0; j < N1; ++j) d.lambda(n, j) = lambda(j) * nabla / budget;
        finish(nabla * y);
        if (!done) {
            throw ConvergenceError("solve_macro: dual iteration did not converge for MU " + std::to_string(n + 1),
                                   std::abs(x1));
        }
    }
    return sol;
}

MacroSolution solve_macro(const ChannelSet& channels, const CirArray& u, const std::vector<int>& alpha,
                          const RVec& gamma_M, double p_tol, const RVec& cross_star, double noise,
                          const MacroSchedule& schedule) {
    return solve_macro(macro_coefficients(channels, u, alpha, cross_star, noise), gamma_M, p_tol, schedule);
}

CoupledLp build_coupled_lp(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                           const RVec& gamma_F, double noise) {
    const int N0 = channels.h0.users();
    const int N1 = channels.h1.users();
    require(gamma_M.size() == N0 && gamma_F.size() == N1, ErrorKind::dimension,
            "build_coupled_lp: threshold vector length mismatch");
    CoupledLp lp{RMat::Zero(N0 + N1, N0 + N1), RVec::Zero(N0 + N1), 0.0};

    for (int n = 0; n < N0; ++n) {
        const CVec y = response(beams.u, n, channels.h0, n);
        const double main = std::norm(y(beams.alpha[static_cast<std::size_t>(n)]));
        const double isi = std::max(y.squaredNorm() - main, 0.0);
        const double phi = main - gamma_M(n) * isi;
        if (!(phi > 0.0))
            throw Error(ErrorKind::infeasible, "centralized: MU " + std::to_string(n + 1) + " target unreachable");
        const double c = gamma_M(n) / phi;
        for (int k = 0; k < N0; ++k)
            if (k != n) lp.F(n, k) = c * response(beams.u, k, channels.h0, n).squaredNorm();
        for (int j = 0; j < N1; ++j) lp.F(n, N0 + j) = c * response(beams.g, j, channels.h10, n).squaredNorm();
        lp.v(n) = c * noise;
    }
    for (int j = 0; j < N1; ++j) {
        const CVec y = response(beams.g, j, channels.h1, j);
        const double main = std::norm(y(beams.beta));
        const double isi = std::max(y.squaredNorm() - main, 0.0);
        const double phi = main - gamma_F(j) * isi;
        if (!(phi > 0.0))
            throw Error(ErrorKind::infeasible, "centralized: FU " + std::to_string(j + 1) + " target unreachable");
        const double c = gamma_F(j) / phi;
        for (int k = 0; k < N1; ++k)
            if (k != j) lp.F(N0 + j, N0 + k) = c * response(beams.g, k, channels.h1, j).squaredNorm();
        for (int n = 0; n < N0; ++n) lp.F(N0 + j, n) = c * response(beams.u, n, channels.h01, j).squaredNorm();
        lp.v(N0 + j) = c * noise;
    }
    lp.rho = spectral_radius(lp.F);
    return lp;
}

void evaluate_allocation(const ChannelSet& channels, double noise, AllocationResult& r) {
    const int N0 = channels.h0.users();
    const int N1 = channels.h1.users();
    r.sinr_mu.resize(N0);
    r.sinr_fu.resize(N1);
    for (int n = 0; n < N0; ++n) r.sinr_mu(n) = sinr(mu_breakdown(channels, r.beams, r.p0, r.p1, n, noise));
    for (int j = 0; j < N1; ++j) r.sinr_fu(j) = sinr(fu_breakdown(channels, r.beams, r.p0, r.p1, j, noise));
    r.total_power = r.p0.sum() + r.p1.sum();
}

AllocationResult solve_centralized(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                                   const RVec& gamma_F, double noise) {
    const CoupledLp lp = build_coupled_lp(channels, beams, gamma_M, gamma_F, noise);
    if (!(lp.rho < 1.0))
        throw Error(ErrorKind::infeasible,
                    "centralized: spectral radius " + std::to_string(lp.rho) + " >= 1, no feasible power");
    const Eigen::Index N = lp.v.size();
    const RVec p = solve_linear(RMat::Identity(N, N) - lp.F, lp.v);
    check_nonnegative(p, "solve_centralized");

    const int N0 = channels.h0.users();
    AllocationResult r;
    r.beams = beams;
    r.p0 = p.head(N0);
    r.p1 = p.tail(N - N0);
    r.feasible = true;
    evaluate_allocation(channels, noise, r);
    return r;
}

AllocationResult solve_proposed(const ChannelSet& channels, const BeamformerSet& beams, const RVec& gamma_M,
                                const RVec& gamma_F, double p_tol, double noise, const MacroSchedule& schedule) {
    AllocationResult r;
    r.beams = beams;

    const FemtoLp lp = build_femto_lp(channels, beams.g, gamma_F, p_tol, noise);
    r.p1 = solve_femto(lp);
    r.cross_report = cross_report(channels, beams.g, r.p1);

    const MacroSolution macro =
        solve_macro(channels, beams.u, beams.alpha, gamma_M, p_tol, r.cross_report, noise, schedule);
    macro.require_feasible();
    r.p0 = macro.p;
    r.iterations = macro.dual.iterations;
    r.feasible = true;
    evaluate_allocation(channels, noise, r);
    return r;
}

AllocationResult solve_proposed(const ChannelSet& channels, const RVec& gamma_M, const RVec& gamma_F, double p_tol,
                                double noise, const MacroSchedule& schedule) {
    BeamformerSet beams;
    beams.g = tr_beamformers(channels.h1);
    beams.beta = channels.L() - 1;
    const FemtoLp lp = build_femto_lp(channels, beams.g, gamma_F, p_tol, noise);
    const PowerVector p1 = solve_femto(lp);
    const RVec report = cross_report(channels, beams.g, p1);
    ZfSelection zf = zf_select(channels);
    beams.u = std::move(zf.u);
    beams.alpha = std::move(zf.alpha);

    const MacroSolution macro =
        solve_macro(channels, beams.u, beams.alpha, gamma_M, p_tol, report, noise, schedule);
    macro.require_feasible();

    AllocationResult r;
    r.beams = std::move(beams);
    r.p1 = p1;
    r.cross_report = report;
    r.p0 = macro.p;
    r.iterations = macro.dual.iterations;
    r.feasible = true;
    evaluate_allocation(channels, noise, r);
    return r;
}

}  // namespace hetnet
