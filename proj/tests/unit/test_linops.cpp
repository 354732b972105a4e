#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "hetnet/linops.hpp"
#include "helpers.hpp"

using namespace hetnet;
using testing_util::random_cmat;
using testing_util::random_cvec;

TEST(Convolve, DeltaIsIdentity) {
    Rng rng(1);
    const CVec b = random_cvec(6, rng);
    const CVec a = CVec::Ones(1);
    EXPECT_TRUE(convolve(a, b).isApprox(b));
}

TEST(Convolve, ZeroAnnihilates) {
    Rng rng(2);
    const CVec y = convolve(CVec::Zero(3), random_cvec(5, rng));
    EXPECT_EQ(y.size(), 7);
    EXPECT_EQ(y.norm(), 0.0);
}

TEST(Convolve, HandExample) {
    CVec a(2), b(2);
    a << 1.0, 2.0;
    b << 3.0, 4.0;
    const CVec y = convolve(a, b);
    ASSERT_EQ(y.size(), 3);
    EXPECT_EQ(y(0), cplx(3.0));
    EXPECT_EQ(y(1), cplx(10.0));
    EXPECT_EQ(y(2), cplx(8.0));
}

TEST(Convolve, EmptyInputThrows) { EXPECT_THROW(convolve(CVec(0), CVec::Ones(2)), Error); }

TEST(Convolve, CommutativeAndMatchesNaiveSum) {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const CVec a = random_cvec(1 + t % 7, rng);
        const CVec b = random_cvec(1 + (t * 3) % 5, rng);
        const CVec ab = convolve(a, b);
        EXPECT_LE((ab - convolve(b, a)).norm(), 1e-12 * ab.norm());
        EXPECT_LE((ab - testing_util::naive_conv(a, b)).norm(), 1e-12 * ab.norm());
    }
}

TEST(Convolve, Bilinear) {
    Rng rng(4);
    const CVec a = random_cvec(4, rng), a2 = random_cvec(4, rng), b = random_cvec(6, rng);
    const cplx s(0.3, -1.2);
    const CVec lhs = convolve(CVec(s * a + a2), b);
    const CVec rhs = s * convolve(a, b) + convolve(a2, b);
    EXPECT_LE((lhs - rhs).norm(), 1e-12 * rhs.norm());
}

TEST(Sylvester, SingleRowIsTheRow) {
    CRowVec r(3);
    r << cplx(1, 2), cplx(3, 0), cplx(0, -1);
    const CMat H = sylvester_matrix(std::vector<CRowVec>{r});
    ASSERT_EQ(H.rows(), 1);
    ASSERT_EQ(H.cols(), 3);
    EXPECT_EQ(H.row(0), r);
}

TEST(Sylvester, TwoTapBand) {
    const cplx a(1, 1), b(2, -1);
    CRowVec ra(1), rb(1);
    ra << a;
    rb << b;
    const CMat H = sylvester_matrix(std::vector<CRowVec>{ra, rb});
    CMat expect(3, 2);
    expect << a, 0.0, b, a, 0.0, b;
    EXPECT_EQ(H, expect);
}

TEST(Sylvester, InconsistentWidthsThrow) {
    std::vector<CRowVec> rows{CRowVec::Ones(2), CRowVec::Ones(3)};
    try {
        sylvester_matrix(rows);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::dimension);
    }
}

TEST(Sylvester, ReproducesMultiAntennaConvolution) {
    Rng rng(5);
    const int L = 6, M = 4;
    const CMat taps = random_cmat(L, M, rng);
    const CMat H = sylvester_matrix(taps);
    ASSERT_EQ(H.rows(), 11);
    ASSERT_EQ(H.cols(), 24);
    std::vector<CVec> u;
    for (int m = 0; m < M; ++m) u.push_back(random_cvec(L, rng));
    CVec x(M * L);
    for (int l = 0; l < L; ++l)
        for (int m = 0; m < M; ++m) x(l * M + m) = u[m](l);
    CVec direct = CVec::Zero(2 * L - 1);
    for (int m = 0; m < M; ++m) direct += testing_util::naive_conv(u[m], taps.col(m));
    EXPECT_LE((H * x - direct).norm(), 1e-12 * direct.norm());
}

TEST(Toeplitz, Scalar) {
    CVec g(1);
    g << cplx(2, 3);
    const CMat G = toeplitz_conv_matrix(g);
    ASSERT_EQ(G.rows(), 1);
    EXPECT_EQ(G(0, 0), g(0));
}

TEST(Toeplitz, TwoTap) {
    CVec g(2);
    g << cplx(1, 0), cplx(0, 1);
    CMat expect(3, 2);
    expect << g(0), 0.0, g(1), g(0), 0.0, g(1);
    EXPECT_EQ(toeplitz_conv_matrix(g), expect);
}

TEST(Toeplitz, MatchesConvolve) {
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        const CVec g = random_cvec(6, rng), x = random_cvec(6, rng);
        const CVec y = testing_util::naive_conv(g, x);
        EXPECT_LE((toeplitz_conv_matrix(g) * x - y).norm(), 1e-12 * y.norm());
    }
}

TEST(PseudoInverse, Identity) {
    const CMat I = CMat::Identity(4, 4);
    EXPECT_TRUE(pseudo_inverse(I).isApprox(I));
}

TEST(PseudoInverse, RankDeficientDiagonal) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 2.0;
    const Eigen::MatrixXd P = pseudo_inverse(A);
    EXPECT_DOUBLE_EQ(P(0, 0), 0.5);
    EXPECT_EQ(P(1, 1), 0.0);
    EXPECT_EQ(P(0, 1), 0.0);
}

TEST(PseudoInverse, FullRowRankRightInverse) {
    Rng rng(7);
    const CMat A = random_cmat(11, 24, rng);
    const CMat P = pseudo_inverse(A);
    EXPECT_LE((A * P - CMat::Identity(11, 11)).norm(), 1e-8);
}

TEST(PseudoInverse, MoorePenroseIdentities) {
    Rng rng(8);
    // rank 3 in a 5 x 7 matrix
    const CMat A = random_cmat(5, 3, rng) * random_cmat(3, 7, rng);
    const CMat P = pseudo_inverse(A);
    const double tol = 1e-9 * A.norm();
    EXPECT_LE((A * P * A - A).norm(), tol);
    EXPECT_LE((P * A * P - P).norm(), tol * P.norm());
    EXPECT_LE((A * P - (A * P).adjoint()).norm(), tol);
    EXPECT_LE((P * A - (P * A).adjoint()).norm(), tol);
}

TEST(PseudoInverse, InvolutionOnFullRank) {
    Rng rng(9);
    const CMat A = random_cmat(6, 4, rng);
    EXPECT_LE((pseudo_inverse(pseudo_inverse(A)) - A).norm(), 1e-8 * A.norm());
}

TEST(PseudoInverse, NonFiniteThrows) {
    CMat A = CMat::Identity(2, 2);
    A(1, 0) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    EXPECT_THROW(pseudo_inverse(A), Error);
}

TEST(DominantEig, Diagonal) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = 1.0;
    const auto e = dominant_eigpair(A);
    EXPECT_NEAR(e.value, 3.0, 1e-9);
    EXPECT_NEAR(std::abs(e.vector(0)), 1.0, 1e-6);
}

TEST(DominantEig, RankOne) {
    Rng rng(10);
    CVec v = random_cvec(5, rng);
    v.normalize();
    const CMat A = v * v.adjoint();
    const auto e = dominant_eigpair(A);
    EXPECT_NEAR(e.value, 1.0, 1e-9);
    EXPECT_NEAR(std::abs(v.dot(e.vector)), 1.0, 1e-9);
}

TEST(DominantEig, MatchesDenseSolverOnGram) {
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
        const CMat X = random_cmat(11, 11, rng);
        const CMat A = X.adjoint() * X;
        const double expect = Eigen::SelfAdjointEigenSolver<CMat>(A).eigenvalues().maxCoeff();
        const auto e = dominant_eigpair(A, 1e-12, 1000000);
        EXPECT_LE(std::abs(e.value - expect), 1e-8 * expect);
        EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
        // eigenvalue dominates any Rayleigh quotient
        for (int k = 0; k < 20; ++k) {
            CVec x = random_cvec(11, rng);
            x.normalize();
            EXPECT_GE(e.value * (1 + 1e-12), std::real(x.dot(A * x)));
        }
    }
}

TEST(DominantEig, RejectsNonHermitian) {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 2.0, 0.0, 1.0;
    try {
        dominant_eigpair(A);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(DominantEig, ReportsNonConvergence) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    A(0, 0) = 1.0001;
    EXPECT_THROW(dominant_eigpair(A, 1e-14, 3), ConvergenceError);
}

TEST(SpectralRadius, Zero) { EXPECT_EQ(spectral_radius(Eigen::MatrixXd::Zero(3, 3)), 0.0); }

TEST(SpectralRadius, SymmetricPermutation) {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 0.5, 0.5, 0.0;
    EXPECT_NEAR(spectral_radius(A), 0.5, 1e-12);
}

TEST(SpectralRadius, MatchesDenseSolver) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXd A(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) A(i, j) = u(rng) < 0.3 ? 0.0 : u(rng);
        const double expect = Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues().cwiseAbs().maxCoeff();
        EXPECT_LE(std::abs(spectral_radius(A) - expect), 1e-8 * std::max(expect, 1.0));
    }
}

TEST(SpectralRadius, RejectsNegativeEntries) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    A(0, 1) = -0.1;
    EXPECT_THROW(spectral_radius(A), Error);
}
