#pragma once

#include <random>

#include "hetnet/channel.hpp"

namespace testing_util {

inline hetnet::CVec random_cvec(int n, hetnet::Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    hetnet::CVec v(n);
    for (int k = 0; k < n; ++k) v(k) = {nd(rng), nd(rng)};
    return v;
}

inline hetnet::CMat random_cmat(int r, int c, hetnet::Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    hetnet::CMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = {nd(rng), nd(rng)};
    return m;
}

inline hetnet::CirArray random_cirs(int antennas, int users, int L, hetnet::Rng& rng) {
    hetnet::CirArray a(antennas, users, L);
    for (int i = 0; i < antennas; ++i)
        for (int u = 0; u < users; ++u) a(i, u) = random_cvec(L, rng);
    return a;
}

inline hetnet::ChannelSet table_vi_channels(std::uint64_t seed, int N1 = 2) {
    hetnet::ScenarioConfig cfg;
    cfg.N1 = N1;
    hetnet::Rng rng = hetnet::make_stream(seed, 0);
    const auto geo = hetnet::place_nodes(cfg, rng);
    return hetnet::draw_channel_set(cfg, geo, rng);
}

// Naive direct-summation convolution, written independently of the library.
inline hetnet::CVec naive_conv(const hetnet::CVec& a, const hetnet::CVec& b) {
    hetnet::CVec out = hetnet::CVec::Zero(a.size() + b.size() - 1);
    for (int k = 0; k < out.size(); ++k)
        for (int j = 0; j < a.size(); ++j)
            if (k - j >= 0 && k - j < b.size()) out(k) += a(j) * b(k - j);
    return out;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_util
