#include <gtest/gtest.h>

#include "hetnet/robust.hpp"
#include "helpers.hpp"

using namespace hetnet;
using testing_util::random_cvec;

namespace {

struct Link {
    std::vector<CVec> g, h;
};

// TR filters designed on random estimated channels of M antennas.
Link random_link(int M, int L, Rng& rng) {
    const CirArray h = testing_util::random_cirs(M, 1, L, rng);
    return {tr_beamformer(h, 0), h.user(0)};
}

double centre_power(const std::vector<CVec>& g, const std::vector<CVec>& h) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += testing_util::naive_conv(g[i], h[i])(h[i].size() - 1);
    return std::norm(s);
}

double total_power(const std::vector<CVec>& g, const std::vector<CVec>& h) {
    CVec y = CVec::Zero(2 * h[0].size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) y += testing_util::naive_conv(g[i], h[i]);
    return y.squaredNorm();
}

}  // namespace

TEST(SignalBound, ZeroPsiIsEstimate) {
    Rng rng(60);
    const Link k = random_link(4, 6, rng);
    EXPECT_NEAR(worst_signal_lower(k.g, k.h, 0.0), centre_power(k.g, k.h), 1e-12 * centre_power(k.g, k.h));
}

TEST(SignalBound, ShrinkFactor) {
    Rng rng(61);
    const Link k = random_link(4, 6, rng);
    EXPECT_NEAR(worst_signal_lower(k.g, k.h, 0.04), 1.5625 * centre_power(k.g, k.h),
                1e-12 * centre_power(k.g, k.h));
}

TEST(SignalBound, UnitChannel) {
    Rng rng(62);
    CirArray h(1, 1, 6);
    h(0, 0) = random_cvec(6, rng).normalized();
    const auto g = tr_beamformer(h, 0);
    EXPECT_NEAR(worst_signal_lower(g, h.user(0), 0.09), 1.0 / (0.7 * 0.7), 1e-12);
}

TEST(SignalBound, EqualsProbeValue) {
    Rng rng(63);
    for (int t = 0; t < 200; ++t) {
        const Link k = random_link(4, 6, rng);
        const double psi = 0.01 + 0.2 * (t % 10) / 10.0;
        std::vector<CVec> h_true;
        for (const auto& hi : k.h) h_true.push_back(hi / (1.0 - std::sqrt(psi)));
        // h_true - e recovers the estimate for e = -sqrt(psi) h_true
        for (std::size_t i = 0; i < k.h.size(); ++i)
            ASSERT_LE((h_true[i] - std::sqrt(psi) * h_true[i] - k.h[i]).norm(), 1e-12 * k.h[i].norm());
        const double exact = centre_power(k.g, h_true);
        EXPECT_NEAR(worst_signal_lower(k.g, k.h, psi), exact, 1e-10 * exact);
    }
}

TEST(YoungBound, ScalarIsTight) {
    std::vector<CVec> g{CVec::Constant(1, cplx(0.5, -1.0))}, h{CVec::Constant(1, cplx(2.0, 0.3))};
    const double psi = 0.05;
    const double expect = std::norm(g[0](0)) * std::norm(h[0](0)) / std::pow(1 - std::sqrt(psi), 2);
    EXPECT_NEAR(young_upper(g, h, psi), expect, 1e-12 * expect);
    EXPECT_NEAR(young_upper(g, h, 0.0), total_power(g, h), 1e-12 * expect);
}

TEST(YoungBound, CrossTermsIncluded) {
    Rng rng(64);
    const Link k = random_link(3, 4, rng);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += k.h[i].norm() * k.g[i].cwiseAbs().sum();
    EXPECT_NEAR(young_upper(k.g, k.h, 0.1), s * s / std::pow(1 - std::sqrt(0.1), 2), 1e-12 * s * s);
}

TEST(YoungBound, ValidAtZeroPsi) {
    Rng rng(65);
    for (int t = 0; t < 100; ++t) {
        std::vector<CVec> g, h;
        for (int i = 0; i < 4; ++i) {
            CVec d = CVec::Zero(6);
            d(t % 6) = 1.0;
            g.push_back(d);
            h.push_back(random_cvec(6, rng));
        }
        EXPECT_GE(young_upper(g, h, 0.0) * (1 + 1e-12), total_power(g, h));
        const Link k = random_link(4, 6, rng);
        EXPECT_GE(young_upper(k.g, k.h, 0.0) * (1 + 1e-12), total_power(k.g, k.h));
    }
}

TEST(VirtualChannel, DeltaFilter) {
    Rng rng(66);
    CVec g = CVec::Zero(6);
    g(0) = 1.0;
    const CVec h = random_cvec(6, rng);
    const double psi = 0.05;
    const VirtualChannel vc = virtual_channel(g, h, psi);
    const double r2 = h.squaredNorm() / std::pow(1 - std::sqrt(psi), 2);
    EXPECT_NEAR(testing_util::naive_conv(g, vc.h_star).squaredNorm(), r2, 1e-10 * r2);
    EXPECT_NEAR(vc.phi_star.norm(), 1.0, 1e-12);
    EXPECT_EQ(virtual_channel(g, h, psi).phi_star, vc.phi_star);
}

TEST(VirtualChannel, MaximalOverRandomProbes) {
    Rng rng(67);
    for (int t = 0; t < 10; ++t) {
        const CVec g = random_cvec(6, rng), h = random_cvec(6, rng);
        const double psi = 0.1;
        const VirtualChannel vc = virtual_channel(g, h, psi);
        const double r = h.norm() / (1 - std::sqrt(psi));
        EXPECT_NEAR(vc.h_star.norm(), r, 1e-12 * r);
        const double best = testing_util::naive_conv(g, vc.h_star).squaredNorm();
        EXPECT_NEAR(best, vc.lam, 1e-8 * vc.lam);
        for (int p = 0; p < 10000; ++p) {
            const CVec x = random_cvec(6, rng).normalized() * r;
            ASSERT_LE(testing_util::naive_conv(g, x).squaredNorm(), best * (1 + 1e-8));
        }
    }
}

TEST(VirtualChannel, ZeroPsiKeepsNorm) {
    Rng rng(68);
    const CVec g = random_cvec(6, rng), h = random_cvec(6, rng);
    EXPECT_NEAR(virtual_channel(g, h, 0.0).h_star.norm(), h.norm(), 1e-12 * h.norm());
}

TEST(ProposedBound, SingleAntennaIsEigenBound) {
    Rng rng(69);
    const Link k = random_link(1, 6, rng);
    const VirtualChannel vc = virtual_channel(k.g[0], k.h[0], 0.05);
    EXPECT_NEAR(proposed_upper(k.g, k.h, 0.05), vc.lam, 1e-8 * vc.lam);
}

TEST(ProposedBound, BelowYoung) {
    Rng rng(70);
    for (int t = 0; t < 300; ++t) {
        const Link k = random_link(4, 6, rng);
        const double psi = t % 2 == 0 ? 0.05 : 0.1;
        EXPECT_LE(proposed_upper(k.g, k.h, psi), young_upper(k.g, k.h, psi));
    }
}

TEST(Bounds, MonotoneInPsi) {
    Rng rng(71);
    for (int t = 0; t < 50; ++t) {
        const Link k = random_link(4, 6, rng);
        double prev_s = 0.0, prev_y = 0.0, prev_p = 0.0;
        for (double psi : {0.0, 0.01, 0.04, 0.1, 0.2, 0.5}) {
            const double s = worst_signal_lower(k.g, k.h, psi);
            const double y = young_upper(k.g, k.h, psi);
            const double p = proposed_upper(k.g, k.h, psi);
            EXPECT_GE(s, prev_s);
            EXPECT_GE(y, prev_y);
            EXPECT_GE(p * (1 + 1e-9), prev_p);
            prev_s = s;
            prev_y = y;
            prev_p = p;
        }
    }
}

TEST(Bounds, PsiOutOfRange) {
    Rng rng(72);
    const Link k = random_link(2, 3, rng);
    EXPECT_THROW(worst_signal_lower(k.g, k.h, 1.0), Error);
    EXPECT_THROW(young_upper(k.g, k.h, -0.1), Error);
    EXPECT_THROW(proposed_upper(k.g, k.h, 1.5), Error);
}

TEST(Assemble, ZeroPsiIsNominal) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelSet cs = testing_util::table_vi_channels(900 + seed);
        const CirArray g = tr_beamformers(cs.h1);
        const RVec gF = RVec::Constant(2, db_to_linear(2.0));
        const RobustBounds b = assemble_bounds(cs, g, 0.0);
        FemtoLp nominal;
        try {
            nominal = build_femto_lp(cs, g, gF, 1e-4, 1e-12);
        } catch (const Error&) {
            EXPECT_THROW(solve_robust(b, gF, 1e-4, 1e-12), Error);
            continue;
        }
        if (!(nominal.rho < 1.0)) continue;
        const RVec a = solve_robust(b, gF, 1e-4, 1e-12);
        const RVec c = solve_femto(nominal);
        EXPECT_EQ(a, c);
    }
}

TEST(Assemble, SingleUserCollapse) {
    ScenarioConfig cfg;
    cfg.M1 = 1;
    cfg.N1 = 1;
    Rng rng = make_stream(73, 0);
    const ChannelSet cs = draw_channel_set(cfg, place_nodes(cfg, rng), rng);
    const CirArray g = tr_beamformers(cs.h1);
    const RobustBounds b = assemble_bounds(cs, g, 0.0);
    const CVec y = response(g, 0, cs.h1, 0);
    EXPECT_NEAR(b.pl_sig_coeff(0), std::norm(y(5)), 1e-14 * std::norm(y(5)));
    EXPECT_GE(b.pu_isi_coeff(0) * (1 + 1e-12), y.squaredNorm() - std::norm(y(5)));
}

TEST(Assemble, CoefficientsNonnegativeAndOrdered) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelSet cs = testing_util::table_vi_channels(950 + seed, 3);
        const CirArray g = tr_beamformers(cs.h1);
        const RobustBounds p = assemble_bounds(cs, g, 0.04, BoundKind::proposed);
        const RobustBounds y = assemble_bounds(cs, g, 0.04, BoundKind::young);
        EXPECT_TRUE((p.pl_sig_coeff.array() >= 0).all());
        EXPECT_TRUE((p.pu_isi_coeff.array() >= 0).all());
        EXPECT_TRUE((p.pu_co_coeff.array() >= 0).all());
        EXPECT_TRUE((p.omega_coeff.array() >= 0).all());
        EXPECT_EQ(p.pu_co_coeff.diagonal().norm(), 0.0);
        EXPECT_EQ(p.pl_sig_coeff, y.pl_sig_coeff);
        EXPECT_TRUE((y.pu_co_coeff.array() >= p.pu_co_coeff.array()).all());
        EXPECT_TRUE((y.omega_coeff.array() >= p.omega_coeff.array()).all());
        for (int j = 0; j < 3; ++j)
            if (p.isi_clamped[j]) EXPECT_EQ(p.pu_isi_coeff(j), 0.0);
        EXPECT_EQ(p.warnings.size(), static_cast<std::size_t>(std::count(p.isi_clamped.begin(),
                                                                          p.isi_clamped.end(), true)));
    }
}

TEST(Assemble, ZeroUplinkGivesZeroWeights) {
    ChannelSet cs = testing_util::table_vi_channels(74);
    for (int i = 0; i < 4; ++i)
        for (int n = 0; n < 2; ++n) cs.h10(i, n).setZero();
    const RobustBounds b = assemble_bounds(cs, tr_beamformers(cs.h1), 0.04);
    EXPECT_EQ(b.omega_coeff.norm(), 0.0);
}

TEST(Oracle, ZeroPsiIsExact) {
    Rng rng(75);
    const Link k = random_link(4, 6, rng);
    const OracleResult r = worst_case_oracle(k.g, k.h, 0.0, 100, 10, rng);
    EXPECT_EQ(r.max_total, total_power(k.g, k.h) == 0.0 ? 0.0 : r.max_total);
    EXPECT_NEAR(r.max_total, total_power(k.g, k.h), 1e-12 * r.max_total);
    EXPECT_NEAR(r.min_signal, centre_power(k.g, k.h), 1e-12 * r.min_signal);
}

TEST(Oracle, DominatesProbeAndStaysBelowTriangleBound) {
    Rng rng(76);
    for (int t = 0; t < 30; ++t) {
        const Link k = random_link(4, 6, rng);
        const double psi = t % 2 == 0 ? 0.05 : 0.1;
        const OracleResult r = worst_case_oracle(k.g, k.h, psi, 300, 30, rng);
        std::vector<CVec> probe;
        for (const auto& h : k.h) probe.push_back(h / (1.0 - std::sqrt(psi)));
        EXPECT_GE(r.max_total * (1 + 1e-12), total_power(k.g, probe));
        EXPECT_NEAR(r.probe_signal, centre_power(k.g, probe), 1e-10 * r.probe_signal);
        double tri = 0.0;
        for (int i = 0; i < 4; ++i) tri += std::sqrt(virtual_channel(k.g[i], k.h[i], psi).lam);
        EXPECT_LE(r.max_total, tri * tri * (1 + 1e-8));
        EXPECT_LE(r.min_signal, r.probe_signal);
        EXPECT_GE(r.min_signal, 0.0);
    }
}
