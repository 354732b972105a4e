#include "hetnet/beamform.hpp"

#include <cmath>

namespace hetnet {

namespace {

constexpr double kRowSpaceTol = 1e-6;
// Gammas within this relative margin count as tied.
constexpr double kTieTol = 1e-12;

ZfCandidate candidate_from_pinv(const CMat& H, const CMat& pinv, int antennas, int L, int n, int tap,
                                ZfPolicy policy) {
    const int width = 2 * L - 1;
    require(tap >= 0 && tap < width, ErrorKind::domain, "zf_candidate: tap out of range");
    const Eigen::Index row = static_cast<Eigen::Index>(n) * width + tap;
    const CVec x = pinv.col(row);
    CVec z = CVec::Zero(H.rows());
    z(row) = 1.0;
    const double residual = (H * x - z).norm();
    const double xn = x.norm();
    if (policy == ZfPolicy::exact && (residual > kRowSpaceTol || xn == 0.0))
        throw Error(ErrorKind::infeasible, "zf_candidate: tap " + std::to_string(tap + 1) + " of user " +
                                               std::to_string(n + 1) + " is unreachable (residual " +
                                               std::to_string(residual) + ")");
    ZfCandidate cand;
    cand.tap = tap;
    cand.residual = residual;
    if (xn == 0.0) {
        cand.c = 0.0;
        cand.filters.assign(static_cast<std::size_t>(antennas), CVec::Zero(L));
        return cand;
    }
    cand.c = 1.0 / xn;
    cand.filters = unvec_filters(cand.c * x, antennas, L);
    return cand;
}

}  // namespace

CVec response(const std::vector<CVec>& filters, const CirArray& h, int rx) {
    require(static_cast<int>(filters.size()) == h.antennas(), ErrorKind::dimension,
            "response: filter count does not match antenna count");
    CVec y = convolve(filters.front(), h(0, rx));
    for (int m = 1; m < h.antennas(); ++m) y += convolve(filters[static_cast<std::size_t>(m)], h(m, rx));
    return y;
}

CVec response(const CirArray& filters, int user, const CirArray& h, int rx) {
    require(filters.antennas() == h.antennas(), ErrorKind::dimension,
            "response: filter array does not match antenna count");
    CVec y = convolve(filters(0, user), h(0, rx));
    for (int m = 1; m < h.antennas(); ++m) y += convolve(filters(m, user), h(m, rx));
    return y;
}

CMat stacked_sylvester(const CirArray& h) {
    const int M = h.antennas();
    const int L = h.taps();
    const int width = 2 * L - 1;
    CMat H(static_cast<Eigen::Index>(h.users()) * width, static_cast<Eigen::Index>(M) * L);
    CMat taps(L, M);
    for (int n = 0; n < h.users(); ++n) {
        for (int m = 0; m < M; ++m) taps.col(m) = h(m, n);
        H.middleRows(static_cast<Eigen::Index>(n) * width, width) = sylvester_matrix(taps);
    }
    return H;
}

CVec vec_filters(const std::vector<CVec>& filters) {
    const int M = static_cast<int>(filters.size());
    const int L = static_cast<int>(filters.front().size());
    CVec x(static_cast<Eigen::Index>(M) * L);
    for (int l = 0; l < L; ++l)
        for (int m = 0; m < M; ++m) x(l * M + m) = filters[static_cast<std::size_t>(m)](l);
    return x;
}

std::vector<CVec> unvec_filters(const CVec& x, int antennas, int L) {
    require(x.size() == static_cast<Eigen::Index>(antennas) * L, ErrorKind::dimension,
            "unvec_filters: length mismatch");
    std::vector<CVec> f(static_cast<std::size_t>(antennas), CVec(L));
    for (int l = 0; l < L; ++l)
        for (int m = 0; m < antennas; ++m) f[static_cast<std::size_t>(m)](l) = x(l * antennas + m);
    return f;
}

ZfCandidate zf_candidate(const CirArray& h, int n, int tap, ZfPolicy policy) {
    require(n >= 0 && n < h.users(), ErrorKind::domain, "zf_candidate: user index out of range");
    const CMat H = stacked_sylvester(h);
    const CMat pinv = pseudo_inverse(H);
    ZfCandidate cand = candidate_from_pinv(H, pinv, h.antennas(), h.taps(), n, tap, policy);
    cand.gamma = zf_gamma(cand, h, n);
    return cand;
}

ZfCandidate zf_candidate(const ChannelSet& channels, int n, int tap) {
    return zf_candidate(channels.h0, n, tap, ZfPolicy::exact);
}

double zf_gamma(const ZfCandidate& candidate, const CirArray& h, int n) {
    const CVec own = response(candidate.filters, h, n);
    const double main = std::norm(own(candidate.tap));
    const double isi = own.squaredNorm() - main;
    double leak = 0.0;
    for (int k = 0; k < h.users(); ++k)
        if (k != n) leak += response(candidate.filters, h, k).squaredNorm();
    return main / (std::max(isi, 0.0) + leak + 1.0);
}

double zf_gamma(const ZfCandidate& candidate, const ChannelSet& channels, int n) {
    return zf_gamma(candidate, channels.h0, n);
}

ZfSelection zf_select(const CirArray& h, ZfPolicy policy) {
    const int M = h.antennas();
    const int L = h.taps();
    const int width = 2 * L - 1;
    const CMat H = stacked_sylvester(h);
    const CMat pinv = pseudo_inverse(H);

    ZfSelection sel{CirArray(M, h.users(), L), std::vector<int>(static_cast<std::size_t>(h.users()), -1),
                    std::vector<double>(static_cast<std::size_t>(h.users()), 0.0)};
    for (int n = 0; n < h.users(); ++n) {
        bool found = false;
        ZfCandidate best;
        for (int tap = 0; tap < width; ++tap) {
            ZfCandidate cand;
            try {
                cand = candidate_from_pinv(H, pinv, M, L, n, tap, policy);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::infeasible) throw;
                continue;
            }
            cand.gamma = zf_gamma(cand, h, n);
            if (!found || cand.gamma > best.gamma * (1.0 + kTieTol)) {
                best = std::move(cand);
                found = true;
            }
        }
        if (!found)
            throw Error(ErrorKind::infeasible,
                        "zf_select: no reachable tap for user " + std::to_string(n + 1));
        for (int m = 0; m < M; ++m) sel.u(m, n) = best.filters[static_cast<std::size_t>(m)];
        sel.alpha[static_cast<std::size_t>(n)] = best.tap;
        sel.gamma[static_cast<std::size_t>(n)] = best.gamma;
    }
    return sel;
}

ZfSelection zf_select(const ChannelSet& channels) { return zf_select(channels.h0, ZfPolicy::exact); }

std::vector<CVec> tr_beamformer(const CirArray& h1, int j) {
    require(j >= 0 && j < h1.users(), ErrorKind::domain, "tr_beamformer: user index out of range");
    double energy = 0.0;
    for (int i = 0; i < h1.antennas(); ++i) energy += h1(i, j).squaredNorm();
    require(energy > 0.0, ErrorKind::domain, "tr_beamformer: all-zero channel, normalization undefined");
    const double scale = 1.0 / std::sqrt(energy);
    std::vector<CVec> g;
    g.reserve(static_cast<std::size_t>(h1.antennas()));
    for (int i = 0; i < h1.antennas(); ++i) g.push_back(scale * h1(i, j).reverse().conjugate());
    return g;
}

std::vector<CVec> tr_beamformer(const ChannelSet& channels, int j) { return tr_beamformer(channels.h1, j); }

CirArray tr_beamformers(const CirArray& h1) {
    CirArray g(h1.antennas(), h1.users(), h1.taps());
    for (int j = 0; j < h1.users(); ++j) {
        const auto gj = tr_beamformer(h1, j);
        for (int i = 0; i < h1.antennas(); ++i) g(i, j) = gj[static_cast<std::size_t>(i)];
    }
    return g;
}

BeamformerSet design_beams(const ChannelSet& channels) {
    ZfSelection zf = zf_select(channels);
    return {std::move(zf.u), std::move(zf.alpha), tr_beamformers(channels.h1), channels.L() - 1};
}

}  // namespace hetnet
