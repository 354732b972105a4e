#pragma once

#include "hetnet/beamform.hpp"

namespace hetnet {

/// Received power split at one user, watts.
struct PowerBreakdown {
    double sig = 0.0;
    double isi = 0.0;
    double co = 0.0;
    double cross = 0.0;
    double noise = 0.0;

    double total() const { return sig + isi + co + cross + noise; }
};

/// Per-user transmit powers of one tier, watts.
using PowerVector = RVec;

PowerBreakdown mu_breakdown(const ChannelSet& channels, const BeamformerSet& beams, const PowerVector& p0,
                            const PowerVector& p1, int n, double noise_power);

PowerBreakdown fu_breakdown(const ChannelSet& channels, const BeamformerSet& beams, const PowerVector& p0,
                            const PowerVector& p1, int j, double noise_power);

double sinr(const PowerBreakdown& b);

/// Tier-generic breakdown for a single cell with no other tier: used by the
/// femto-only beamformer comparison. `tap` is 0-based.
PowerBreakdown cell_breakdown(const CirArray& filters, const CirArray& h, const PowerVector& p, int user,
                              int tap, double noise_power);

}  // namespace hetnet
