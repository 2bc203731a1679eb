#pragma once

#include <array>

#include "relaybf/types.hpp"

namespace relaybf {

/// Whether a^H Delta^{-1} a - t > 0 (with a small relative slack), computed
/// through a Cholesky solve. Throws when delta is not positive definite.
bool lemma1_feasible(const CMat& delta, const CVec& a, double t);

/// The four per-constraint achievable-SINR bounds, in order
/// {primary 1, primary 2, mu-weighted secondary 1, mu-weighted secondary 2}.
std::array<double, 4> gamma_upper_bound_terms(const DerivedQuantities& dq,
                                              const NetworkConfig& config);

/// Upper bound on the optimal max-min level: the minimum of the four terms.
double gamma_upper_bound(const DerivedQuantities& dq, const NetworkConfig& config);

}  // namespace relaybf
