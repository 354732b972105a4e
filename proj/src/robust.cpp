#include "hetnet/robust.hpp"

#include <cmath>

namespace hetnet {

namespace {

void check_psi(double psi) {
    require(psi >= 0.0 && psi < 1.0, ErrorKind::domain, "robust: psi must lie in [0, 1)");
}

void check_pair(const std::vector<CVec>& g, const std::vector<CVec>& h) {
    require(!g.empty() && g.size() == h.size(), ErrorKind::dimension, "robust: filter / channel count mismatch");
    for (std::size_t i = 0; i < g.size(); ++i)
        require(g[i].size() == h[i].size(), ErrorKind::dimension, "robust: filter / channel length mismatch");
}

double shrink(double psi) {
    const double s = 1.0 - std::sqrt(psi);
    return 1.0 / (s * s);
}

CVec received(const std::vector<CVec>& g, const std::vector<CVec>& h) {
    CVec y = convolve(g.front(), h.front());
    for (std::size_t i = 1; i < g.size(); ++i) y += convolve(g[i], h[i]);
    return y;
}

std::vector<CVec> column(const CirArray& a, int user) { return a.user(user); }

// Row of the convolution matrix of g that produces output sample `tap`.
CVec sample_row(const CVec& g, int tap) {
    const Eigen::Index L = g.size();
    CVec a = CVec::Zero(L);
    for (Eigen::Index k = 0; k < L; ++k) {
        const Eigen::Index idx = tap - k;
        if (idx >= 0 && idx < L) a(k) = g(idx);
    }
    return a;
}

struct Ball {
    CVec centre;
    double radius;
};

// {h : ||h_est - h||^2 <= psi ||h||^2} is the ball with centre h_est/(1-psi)
// and radius sqrt(psi) ||h_est|| / (1-psi).
Ball feasible_ball(const CVec& h_est, double psi) {
    return {h_est / (1.0 - psi), std::sqrt(psi) * h_est.norm() / (1.0 - psi)};
}

CVec project(const CVec& x, const Ball& b) {
    const CVec d = x - b.centre;
    const double n = d.norm();
    if (n <= b.radius) return x;
    return b.centre + d * (b.radius / n);
}

// Largest t with ||t d|| <= sqrt(psi) ||h_est - t d|| for unit d.
double max_radius(const CVec& h_est, const CVec& d, double psi) {
    const double r = std::real(h_est.dot(d));
    const double hn2 = h_est.squaredNorm();
    return (-psi * r + std::sqrt(psi * psi * r * r + (1.0 - psi) * psi * hn2)) / (1.0 - psi);
}

CVec complex_normal(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = cplx(nd(rng), nd(rng));
    return v;
}

}  // namespace

double worst_signal_lower(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi) {
    check_psi(psi);
    check_pair(g_hat, h_hat);
    const int centre = static_cast<int>(h_hat.front().size()) - 1;
    return std::norm(received(g_hat, h_hat)(centre)) * shrink(psi);
}

double young_upper(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi) {
    check_psi(psi);
    check_pair(g_hat, h_hat);
    double s = 0.0;
    for (std::size_t i = 0; i < g_hat.size(); ++i) s += h_hat[i].norm() * g_hat[i].template lpNorm<1>();
    return s * s * shrink(psi);
}

VirtualChannel virtual_channel(const CVec& g_hat, const CVec& h_hat, double psi, double tol) {
    check_psi(psi);
    require(g_hat.size() == h_hat.size(), ErrorKind::dimension, "virtual_channel: length mismatch");
    const CMat G = toeplitz_conv_matrix(g_hat);
    const double r = h_hat.norm() / (1.0 - std::sqrt(psi));
    const CMat gram = (G.adjoint() * G) * (r * r);
    const auto eig = dominant_eigpair(gram, tol);
    VirtualChannel vc;
    vc.phi_star = eig.vector;
    vc.lam = eig.value;
    vc.h_star = eig.vector * r;
    return vc;
}

double proposed_upper(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi) {
    check_psi(psi);
    check_pair(g_hat, h_hat);
    double own = 0.0;
    CVec sum;
    for (std::size_t i = 0; i < g_hat.size(); ++i) {
        const CVec w = convolve(g_hat[i], virtual_channel(g_hat[i], h_hat[i], psi).h_star);
        own += w.squaredNorm();
        sum = i == 0 ? w : CVec(sum + w);
    }
    return own + std::abs(sum.squaredNorm() - own);
}

RobustBounds assemble_bounds(const ChannelSet& channels_est, const CirArray& g_hat, double psi, BoundKind kind) {
    check_psi(psi);
    const int N1 = channels_est.h1.users();
    const int N0 = channels_est.h10.users();
    require(g_hat.users() == N1 && g_hat.antennas() == channels_est.h1.antennas(), ErrorKind::dimension,
            "assemble_bounds: beam array does not match the femto channels");

    RobustBounds b;
    b.kind = kind;
    b.psi = psi;
    b.pl_sig_coeff = RVec::Zero(N1);
    b.pu_isi_coeff = RVec::Zero(N1);
    b.pu_co_coeff = RMat::Zero(N1, N1);
    b.omega_coeff = RVec::Zero(N1);
    b.young_norm = RVec::Zero(N1);
    b.isi_clamped.assign(static_cast<std::size_t>(N1), false);

    if (psi == 0.0) {
        const FemtoLp nominal = build_femto_lp(channels_est, g_hat, RVec::Zero(N1), 1.0, 0.0);
        const int centre = channels_est.L() - 1;
        for (int j = 0; j < N1; ++j) {
            const CVec y = response(g_hat, j, channels_est.h1, j);
            b.pl_sig_coeff(j) = std::norm(y(centre));
            b.pu_isi_coeff(j) = std::max(y.squaredNorm() - b.pl_sig_coeff(j), 0.0);
            b.young_norm(j) = young_upper(column(g_hat, j), column(channels_est.h1, j), 0.0);
        }
        b.pu_co_coeff = nominal.B;
        b.omega_coeff = nominal.eta_hat;
        return b;
    }

    auto upper = [&](const std::vector<CVec>& g, const std::vector<CVec>& h) {
        return kind == BoundKind::proposed ? proposed_upper(g, h, psi) : young_upper(g, h, psi);
    };

    for (int j = 0; j < N1; ++j) {
        const auto gj = column(g_hat, j);
        const auto hj = column(channels_est.h1, j);
        b.pl_sig_coeff(j) = worst_signal_lower(gj, hj, psi);
        b.young_norm(j) = young_upper(gj, hj, psi);
        const double isi = upper(gj, hj) - b.pl_sig_coeff(j);
        if (isi < 0.0) {
            b.isi_clamped[static_cast<std::size_t>(j)] = true;
            b.warnings.push_back("FU " + std::to_string(j + 1) + ": ISI upper bound below the signal bound (" +
                                 std::to_string(isi) + "), clamped to 0");
        }
        b.pu_isi_coeff(j) = std::max(isi, 0.0);
        for (int k = 0; k < N1; ++k)
            if (k != j) b.pu_co_coeff(j, k) = upper(column(g_hat, k), hj);
        for (int n = 0; n < N0; ++n) b.omega_coeff(j) += upper(gj, column(channels_est.h10, n));
    }
    return b;
}

FemtoLp robust_lp(const RobustBounds& bounds, const RVec& gamma_F, double p_tol, double noise) {
    return make_femto_lp(bounds.pl_sig_coeff, bounds.pu_isi_coeff, bounds.pu_co_coeff, bounds.omega_coeff, gamma_F,
                         p_tol, noise);
}

PowerVector solve_robust(const RobustBounds& bounds, const RVec& gamma_F, double p_tol, double noise) {
    return solve_femto(robust_lp(bounds, gamma_F, p_tol, noise));
}

OracleResult worst_case_oracle(const std::vector<CVec>& g_hat, const std::vector<CVec>& h_hat, double psi,
                               int n_probes, int n_ascent, Rng& rng) {
    check_psi(psi);
    check_pair(g_hat, h_hat);
    const std::size_t M = g_hat.size();
    const int centre = static_cast<int>(h_hat.front().size()) - 1;

    std::vector<Ball> balls;
    std::vector<CMat> G;
    std::vector<CVec> a;
    for (std::size_t i = 0; i < M; ++i) {
        balls.push_back(feasible_ball(h_hat[i], psi));
        G.push_back(toeplitz_conv_matrix(g_hat[i]));
        a.push_back(sample_row(g_hat[i], centre));
    }
    auto total = [&](const std::vector<CVec>& h) { return received(g_hat, h).squaredNorm(); };
    auto signal = [&](const std::vector<CVec>& h) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < M; ++i) s += a[i].cwiseProduct(h[i]).sum();
        return std::norm(s);
    };

    OracleResult out;
    std::vector<CVec> hi(M), lo(M);
    for (std::size_t i = 0; i < M; ++i) {
        hi[i] = h_hat[i] / (1.0 - std::sqrt(psi));
        lo[i] = h_hat[i] / (1.0 + std::sqrt(psi));
    }
    out.probe_signal = signal(hi);
    out.max_total = std::max(total(hi), total(lo));
    out.min_signal = std::min(signal(hi), signal(lo));
    out.probes = 2;
    std::vector<CVec> best_hi = total(hi) >= total(lo) ? hi : lo;
    std::vector<CVec> best_lo = signal(lo) <= signal(hi) ? lo : hi;

    if (psi > 0.0) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<CVec> h(M);
        for (int p = 0; p < n_probes; ++p) {
            const bool boundary = unit(rng) < 0.5;
            for (std::size_t i = 0; i < M; ++i) {
                CVec d = complex_normal(h_hat[i].size(), rng);
                d.normalize();
                const double t = max_radius(h_hat[i], d, psi) * (boundary ? 1.0 : unit(rng));
                h[i] = h_hat[i] - t * d;
            }
            ++out.probes;
            const double ft = total(h);
            const double fs = signal(h);
            if (ft > out.max_total) {
                out.max_total = ft;
                best_hi = h;
            }
            if (fs < out.min_signal) {
                out.min_signal = fs;
                best_lo = h;
            }
        }

        // The total energy is convex in h, so moving each antenna to the
        // boundary point of its ball along the gradient never decreases it.
        for (const auto& start : {hi, best_hi}) {
            std::vector<CVec> x = start;
            for (int it = 0; it < n_ascent; ++it) {
                const CVec y = received(g_hat, x);
                for (std::size_t i = 0; i < M; ++i) {
                    const CVec grad = G[i].adjoint() * y;
                    const double gn = grad.norm();
                    if (gn > 0.0) x[i] = balls[i].centre + grad * (balls[i].radius / gn);
                }
                out.max_total = std::max(out.max_total, total(x));
            }
        }

        // Projected gradient descent on the sampled-tap power.
        double lip = 0.0;
        for (std::size_t i = 0; i < M; ++i) lip += a[i].squaredNorm();
        if (lip > 0.0) {
            for (const auto& start : {lo, best_lo}) {
                std::vector<CVec> x = start;
                for (int it = 0; it < n_ascent; ++it) {
                    cplx s = 0.0;
                    for (std::size_t i = 0; i < M; ++i) s += a[i].cwiseProduct(x[i]).sum();
                    for (std::size_t i = 0; i < M; ++i)
                        x[i] = project(x[i] - a[i].conjugate() * (s / lip), balls[i]);
                    out.min_signal = std::min(out.min_signal, signal(x));
                }
            }
        }
    }
    return out;
}

}  // namespace hetnet
