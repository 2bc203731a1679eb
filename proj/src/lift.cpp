#include "relaybf/lift.hpp"

#include <cmath>

namespace relaybf {

Vec lift_complex(const CVec& v) {
    const int n = static_cast<int>(v.size());
    Vec out(2 * n);
    out.head(n) = v.real();
    out.tail(n) = v.imag();
    return out;
}

CVec unlift_complex(const Vec& v) {
    const int n = static_cast<int>(v.size()) / 2;
    CVec out(n);
    out.real() = v.head(n);
    out.imag() = v.tail(n);
    return out;
}

Mat lift_hermitian(const CMat& m) {
    const int n = static_cast<int>(m.rows());
    Mat out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.real();
    out.topRightCorner(n, n) = -m.imag();
    out.bottomLeftCorner(n, n) = m.imag();
    out.bottomRightCorner(n, n) = m.real();
    return out;
}

CMat unlift_hermitian(const Mat& m) {
    const int n = static_cast<int>(m.rows()) / 2;
    CMat out(n, n);
    out.real() = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
    out.imag() = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
    return out;
}

CMat hermitian_sqrt(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(m);
    Vec vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace relaybf
