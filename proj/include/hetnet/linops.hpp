#pragma once

// Complex linear-algebra primitives shared by the beamforming, power and
// robustness code: full-length convolution, the banded convolution matrices,
// an SVD pseudo-inverse, and power-iteration eigen solvers.

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hetnet/error.hpp"

namespace hetnet {

template <typename Real>
using CVecT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CRowVecT = Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic>;
template <typename Real>
using CMatT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cplx = std::complex<double>;
using CVec = CVecT<double>;
using CRowVec = CRowVecT<double>;
using CMat = CMatT<double>;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(std::abs(a(i, j)))) return false;
    return true;
}

template <typename Scalar>
struct real_of {
    using type = Scalar;
};
template <typename Real>
struct real_of<std::complex<Real>> {
    using type = Real;
};

}  // namespace detail

/// Full linear convolution; the result has |a| + |b| - 1 entries.
template <typename DerivedA, typename DerivedB>
auto convolve(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                        typename DerivedB::Scalar>::ReturnType;
    require(a.size() >= 1 && b.size() >= 1, ErrorKind::dimension, "convolve: empty input vector");
    const Eigen::Index na = a.size();
    const Eigen::Index nb = b.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(na + nb - 1);
    for (Eigen::Index j = 0; j < na; ++j) {
        const Scalar aj = a(j);
        for (Eigen::Index k = 0; k < nb; ++k) out(j + k) += aj * b(k);
    }
    return out;
}

/// Banded (2L-1) x L matrix whose product with any length-L x equals convolve(g, x).
template <typename Derived>
auto toeplitz_conv_matrix(const Eigen::MatrixBase<Derived>& g) {
    using Scalar = typename Derived::Scalar;
    require(g.size() >= 1, ErrorKind::dimension, "toeplitz_conv_matrix: empty filter");
    const Eigen::Index L = g.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> G =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * L - 1, L);
    for (Eigen::Index c = 0; c < L; ++c) G.col(c).segment(c, L) = g.derived().reshaped(L, 1);
    return G;
}

/// Sylvester-style block band for one user.
///
/// Row l of `taps` holds tap l of every transmit antenna (an L x M matrix).
/// The result is (2L-1) x (M L); block column c (width M) carries the rows of
/// `taps` shifted down by c. Multiplying it by the tap-major stacking
/// x[c*M + m] = u_m[c] gives sum_m convolve(u_m, h_m).
template <typename Derived>
auto sylvester_matrix(const Eigen::MatrixBase<Derived>& taps) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index L = taps.rows();
    const Eigen::Index M = taps.cols();
    require(L >= 1 && M >= 1, ErrorKind::dimension, "sylvester_matrix: empty tap matrix");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> H =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * L - 1, M * L);
    for (Eigen::Index c = 0; c < L; ++c) H.block(c, c * M, L, M) = taps;
    return H;
}

/// Row-list form; every row must have the same width.
template <typename Real>
CMatT<Real> sylvester_matrix(std::span<const CRowVecT<Real>> rows) {
    require(!rows.empty(), ErrorKind::dimension, "sylvester_matrix: no rows");
    const Eigen::Index M = rows.front().size();
    CMatT<Real> taps(static_cast<Eigen::Index>(rows.size()), M);
    for (std::size_t l = 0; l < rows.size(); ++l) {
        require(rows[l].size() == M, ErrorKind::dimension,
                "sylvester_matrix: inconsistent row widths");
        taps.row(static_cast<Eigen::Index>(l)) = rows[l];
    }
    return sylvester_matrix(taps);
}

inline CMat sylvester_matrix(const std::vector<CRowVec>& rows) {
    return sylvester_matrix(std::span<const CRowVec>(rows));
}

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// 1e-12 * sigma_max are treated as zero.
template <typename Derived>
auto pseudo_inverse(const Eigen::MatrixBase<Derived>& A, double rel_cutoff = 1e-12) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    require(detail::all_finite(A), ErrorKind::domain, "pseudo_inverse: non-finite entry");
    if (A.size() == 0) return Mat(A.cols(), A.rows());
    Eigen::BDCSVD<Mat> svd(A.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const auto smax = s.size() > 0 ? s(0) : 0;
    const auto cutoff = rel_cutoff * smax;
    auto sinv = s;
    for (Eigen::Index i = 0; i < s.size(); ++i) sinv(i) = (s(i) > cutoff && s(i) > 0) ? 1 / s(i) : 0;
    Mat P = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().adjoint();
    return P;
}

template <typename Real>
struct EigPair {
    Real value;
    CVecT<Real> vector;
    int iterations;
};

/// Largest eigenpair of a Hermitian PSD matrix by plain power iteration.
///
/// Starts from the normalized all-ones vector and stops once
/// ||A v - lambda v|| <= tol * lambda, lambda being the Rayleigh quotient.
template <typename Derived>
EigPair<typename detail::real_of<typename Derived::Scalar>::type> dominant_eigpair(
    const Eigen::MatrixBase<Derived>& A, double tol = 1e-10, int max_iter = 100000) {
    using Real = typename detail::real_of<typename Derived::Scalar>::type;
    using Vec = CVecT<Real>;
    require(A.rows() == A.cols() && A.rows() >= 1, ErrorKind::dimension,
            "dominant_eigpair: matrix must be square and non-empty");
    const CMatT<Real> M = A.template cast<std::complex<Real>>();
    const Real scale = M.cwiseAbs().maxCoeff();
    const Real asym = (M - M.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(scale, Real(1e-300)))
        throw Error(ErrorKind::domain, "dominant_eigpair: matrix is not Hermitian");

    const Eigen::Index n = M.rows();
    Vec v = Vec::Ones(n) / std::sqrt(Real(n));
    Real best = std::numeric_limits<Real>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        Vec w = M * v;
        const Real lambda = std::real(v.dot(w));
        const Real wn = w.norm();
        if (wn == 0) return {Real(0), v, it};
        const Real residual = (w - lambda * v).norm();
        if (residual <= tol * lambda) return {lambda, v, it};
        best = std::min(best, lambda > 0 ? residual / lambda : residual);
        v = w / wn;
    }
    throw ConvergenceError("dominant_eigpair: no convergence", static_cast<double>(best));
}

/// Perron root of an entrywise nonnegative square matrix.
///
/// Power iteration on A + s I with s the max row sum; the shift keeps the
/// Perron root strictly dominant for imprimitive matrices.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& A, double tol = 1e-12,
                                         int max_iter = 200000) {
    using Real = typename Derived::Scalar;
    using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
    require(A.rows() == A.cols(), ErrorKind::dimension, "spectral_radius: matrix must be square");
    require(detail::all_finite(A), ErrorKind::domain, "spectral_radius: non-finite entry");
    require((A.array() >= 0).all(), ErrorKind::domain,
            "spectral_radius: negative entry (Perron-Frobenius precondition violated)");
    const Eigen::Index n = A.rows();
    if (n == 0) return Real(0);
    const Real shift = A.rowwise().sum().maxCoeff();
    if (shift == 0) return Real(0);

    Vec x = Vec::Ones(n) / std::sqrt(Real(n));
    Real best = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const Vec ax = A * x;
        const Real lambda = x.dot(ax);
        const Real residual = (ax - lambda * x).norm();
        if (residual <= tol * std::max(lambda, Real(0)) || ax.norm() <= tol * shift * 1e-6)
            return std::max(lambda, Real(0));
        best = std::min(best, residual / std::max(lambda, std::numeric_limits<Real>::min()));
        Vec y = ax + shift * x;
        x = y / y.norm();
    }
    throw ConvergenceError("spectral_radius: no convergence", static_cast<double>(best));
}

}  // namespace hetnet
