#pragma once

#include <vector>

#include "hetnet/channel.hpp"

namespace hetnet {

/// How zf_candidate treats a target tap that the stacked channel cannot reach exactly.
enum class ZfPolicy {
    exact,          // throw Error(infeasible) when the selector is outside the row space
    least_squares,  // keep the pseudo-inverse solution as is
};

/// One zero-forcing candidate for user n sampled at `tap` (0-based).
struct ZfCandidate {
    std::vector<CVec> filters;  // one length-L filter per transmit antenna
    int tap = 0;
    double c = 0.0;             // normalization making the stacked filter unit norm
    double gamma = 0.0;         // ranking factor of Algorithm 1
    double residual = 0.0;      // ||H x - z|| before normalization
};

struct BeamformerSet {
    CirArray u;                 // M0 x N0 macro filters
    std::vector<int> alpha;     // selected tap per MU, 0-based
    CirArray g;                 // M1 x N1 femto filters
    int beta = 0;               // L - 1 (central tap, 0-based)
};

/// Received taps sum_m filters[m] * h(m, rx), length 2L-1.
CVec response(const std::vector<CVec>& filters, const CirArray& h, int rx);
/// Same with the filters of `user` taken from an antennas x users array.
CVec response(const CirArray& filters, int user, const CirArray& h, int rx);

/// Stacks every user's Sylvester block: (users*(2L-1)) x (antennas*L).
CMat stacked_sylvester(const CirArray& h);

/// Tap-major stacking used by the Sylvester blocks: x[l*M + m] = filters[m][l].
CVec vec_filters(const std::vector<CVec>& filters);
std::vector<CVec> unvec_filters(const CVec& x, int antennas, int L);

ZfCandidate zf_candidate(const CirArray& h, int n, int tap, ZfPolicy policy = ZfPolicy::exact);
ZfCandidate zf_candidate(const ChannelSet& channels, int n, int tap);

/// |own tap|^2 / (own ISI + leakage onto the other users + 1).
double zf_gamma(const ZfCandidate& candidate, const CirArray& h, int n);
double zf_gamma(const ZfCandidate& candidate, const ChannelSet& channels, int n);

struct ZfSelection {
    CirArray u;
    std::vector<int> alpha;
    std::vector<double> gamma;
};

/// Algorithm 1: sweep every tap, keep the largest Gamma (smallest tap on ties).
ZfSelection zf_select(const CirArray& h, ZfPolicy policy = ZfPolicy::exact);
ZfSelection zf_select(const ChannelSet& channels);

/// Time-reversal filters of FU j for all femto antennas.
std::vector<CVec> tr_beamformer(const CirArray& h1, int j);
std::vector<CVec> tr_beamformer(const ChannelSet& channels, int j);
/// TR filters for every user, as an antennas x users array.
CirArray tr_beamformers(const CirArray& h1);

/// ZF macro beams plus TR femto beams for one channel realization.
BeamformerSet design_beams(const ChannelSet& channels);

}  // namespace hetnet
