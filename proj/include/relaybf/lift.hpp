#pragma once

#include "relaybf/types.hpp"

namespace relaybf {

/// v -> [Re v; Im v].
Vec lift_complex(const CVec& v);

/// Inverse of lift_complex.
CVec unlift_complex(const Vec& v);

/// Hermitian M -> [[Re M, -Im M], [Im M, Re M]]. Quadratic forms and
/// semidefiniteness carry over: w^H M w = lift(w)^T lift(M) lift(w).
Mat lift_hermitian(const CMat& m);

/// Recovers the Hermitian matrix from its real lift.
CMat unlift_hermitian(const Mat& m);

/// PSD square root through an eigendecomposition, clamping tiny negative
/// eigenvalues from roundoff to zero.
CMat hermitian_sqrt(const CMat& m);

}  // namespace relaybf
