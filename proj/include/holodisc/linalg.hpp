#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>

namespace holodisc {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

namespace detail {

/// Real representation (x; y) of a complex vector x + iy.
inline RVec real_rep(const CVec& v) {
    const auto n = v.size();
    RVec r(2 * n);
    r.head(n) = v.real();
    r.tail(n) = v.imag();
    return r;
}

inline CVec complex_rep(const RVec& r) {
    const auto n = r.size() / 2;
    CVec v(n);
    v.real() = r.head(n);
    v.imag() = r.tail(n);
    return v;
}

/// Multiplication by i in the real representation.
inline RMat j_standard(int n) {
    RMat J = RMat::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = -RMat::Identity(n, n);
    J.bottomLeftCorner(n, n) = RMat::Identity(n, n);
    return J;
}

/// Complex conjugation in the real representation: diag(I, -I).
inline RMat conj_matrix(int n) {
    RMat C = RMat::Identity(2 * n, 2 * n);
    C.bottomRightCorner(n, n) *= -1.0;
    return C;
}

/// Real representation of the C-linear map v -> M v.
inline RMat real_rep_linear(const CMat& M) {
    const auto n = M.rows();
    RMat R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = M.real();
    R.topRightCorner(n, n) = -M.imag();
    R.bottomLeftCorner(n, n) = M.imag();
    R.bottomRightCorner(n, n) = M.real();
    return R;
}

/// Apply a real 2n x 2n matrix to a complex vector through its real
/// representation.
inline CVec apply_real(const RMat& M, const CVec& v) { return complex_rep(RVec(M * real_rep(v))); }

/// Real representation of the anti-linear map v -> M conj(v).
inline RMat real_rep_antilinear(const CMat& M) {
    const auto n = M.rows();
    RMat R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = M.real();
    R.topRightCorner(n, n) = M.imag();
    R.bottomLeftCorner(n, n) = M.imag();
    R.bottomRightCorner(n, n) = -M.real();
    return R;
}

inline double operator_norm(const RMat& M) {
    return Eigen::JacobiSVD<RMat>(M).singularValues()(0);
}

inline double operator_norm(const CMat& M) {
    return Eigen::JacobiSVD<CMat>(M).singularValues()(0);
}

inline double smallest_singular_value(const RMat& M) {
    const auto sv = Eigen::JacobiSVD<RMat>(M).singularValues();
    return sv(sv.size() - 1);
}

}  // namespace detail
}  // namespace holodisc
