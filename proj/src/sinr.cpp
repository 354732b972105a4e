#include "hetnet/sinr.hpp"

#include <cmath>

namespace hetnet {

namespace {

void split_own(const CVec& y, int tap, double power, PowerBreakdown& b) {
    require(tap >= 0 && tap < y.size(), ErrorKind::domain, "breakdown: sampled tap out of range");
    const double main = std::norm(y(tap));
    b.sig = power * main;
    b.isi = power * std::max(y.squaredNorm() - main, 0.0);
}

void check_powers(const PowerVector& p, int users, const char* what) {
    require(p.size() == users, ErrorKind::dimension, std::string(what) + ": power vector length mismatch");
    require((p.array() >= 0).all(), ErrorKind::domain, std::string(what) + ": negative power");
}

}  // namespace

PowerBreakdown mu_breakdown(const ChannelSet& channels, const BeamformerSet& beams, const PowerVector& p0,
                            const PowerVector& p1, int n, double noise_power) {
    const int N0 = channels.h0.users();
    const int N1 = channels.h1.users();
    check_powers(p0, N0, "mu_breakdown");
    check_powers(p1, N1, "mu_breakdown");
    require(n >= 0 && n < N0, ErrorKind::domain, "mu_breakdown: MU index out of range");

    PowerBreakdown b;
    split_own(response(beams.u, n, channels.h0, n), beams.alpha[static_cast<std::size_t>(n)], p0(n), b);
    for (int k = 0; k < N0; ++k)
        if (k != n) b.co += p0(k) * response(beams.u, k, channels.h0, n).squaredNorm();
    for (int j = 0; j < N1; ++j) b.cross += p1(j) * response(beams.g, j, channels.h10, n).squaredNorm();
    b.noise = noise_power;
    return b;
}

PowerBreakdown fu_breakdown(const ChannelSet& channels, const BeamformerSet& beams, const PowerVector& p0,
                            const PowerVector& p1, int j, double noise_power) {
    const int N0 = channels.h0.users();
    const int N1 = channels.h1.users();
    check_powers(p0, N0, "fu_breakdown");
    check_powers(p1, N1, "fu_breakdown");
    require(j >= 0 && j < N1, ErrorKind::domain, "fu_breakdown: FU index out of range");

    PowerBreakdown b;
    split_own(response(beams.g, j, channels.h1, j), beams.beta, p1(j), b);
    for (int k = 0; k < N1; ++k)
        if (k != j) b.co += p1(k) * response(beams.g, k, channels.h1, j).squaredNorm();
    for (int n = 0; n < N0; ++n) b.cross += p0(n) * response(beams.u, n, channels.h01, j).squaredNorm();
    b.noise = noise_power;
    return b;
}

double sinr(const PowerBreakdown& b) {
    const double den = b.isi + b.co + b.cross + b.noise;
    require(den > 0.0, ErrorKind::domain, "sinr: zero interference-plus-noise");
    return b.sig / den;
}

PowerBreakdown cell_breakdown(const CirArray& filters, const CirArray& h, const PowerVector& p, int user,
                              int tap, double noise_power) {
    check_powers(p, h.users(), "cell_breakdown");
    PowerBreakdown b;
    split_own(response(filters, user, h, user), tap, p(user), b);
    for (int k = 0; k < h.users(); ++k)
        if (k != user) b.co += p(k) * response(filters, k, h, user).squaredNorm();
    b.noise = noise_power;
    return b;
}

}  // namespace hetnet
