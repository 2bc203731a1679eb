#pragma once

#include "relaybf/conic/problem.hpp"
#include "relaybf/robust.hpp"
#include "relaybf/types.hpp"

namespace relaybf::conic {

/// Feasibility problem at a given max-min level gamma with exact CSI:
/// primary SINR cones, secondary cones over the lifted matrix variable,
/// per-relay power caps, and the Schur coupling block tying the lifted
/// matrix to the beamforming vector. Minimizes the lifted matrix trace to
/// keep the returned point tight.
ConicProblem build_perfect(const DerivedQuantities& dq, const NetworkConfig& config,
                           double gamma);

/// Worst-case-safe counterpart built from estimated channels: auxiliary
/// norm bounds on the relayed interference, closed-form kappa constants in
/// place of the nominal interference powers, and inflated relay caps.
ConicProblem build_robust(const DerivedQuantities& dq_hat, const NetworkConfig& config,
                          const RobustConstants& rc, const UncertaintyModel& um,
                          double gamma);

/// Restriction of the true feasible set with the secondary numerator phase
/// fixed: the lifted matrix disappears and every block is a plain second-
/// order cone. Any point of the restriction satisfies the original
/// constraints, and the union over phases recovers the full set. Used to
/// extract a verified beamformer when the relaxation returns a loose point.
ConicProblem build_phase_restricted_perfect(const DerivedQuantities& dq,
                                            const NetworkConfig& config, double gamma,
                                            double phase);
ConicProblem build_phase_restricted_robust(const DerivedQuantities& dq_hat,
                                           const NetworkConfig& config,
                                           const RobustConstants& rc,
                                           const UncertaintyModel& um, double gamma,
                                           double phase);

}  // namespace relaybf::conic
