#pragma once

#include "relaybf/conic/problem.hpp"
#include "relaybf/robust.hpp"
#include "relaybf/types.hpp"

namespace relaybf {

struct BisectionConfig {
    double tol_gamma = 0.0;  // absolute interval width target; 0 picks 1e-3 * gamma_up
    int max_iters = 60;
    double solver_tol = 1e-8;
};

/// Number of halvings needed to shrink [0, gamma_up] to the given width.
int bisection_iterations_needed(double gamma_up, double tol_gamma);

/// Max-min beamforming with exact CSI. Every accepted bisection midpoint is
/// post-verified against the original SINR and power constraints; the
/// returned gamma is the last verified lower bound.
BeamformingSolution optimize_perfect(const DerivedQuantities& dq,
                                     const NetworkConfig& config,
                                     const BisectionConfig& bc = {});

/// Worst-case-safe variant run on estimated channels. dq_hat must be derived
/// from um.estimates and rc from robust_constants on the same inputs.
BeamformingSolution optimize_robust(const DerivedQuantities& dq_hat,
                                    const NetworkConfig& config,
                                    const RobustConstants& rc,
                                    const UncertaintyModel& um,
                                    const BisectionConfig& bc = {});

struct ExtractedBeamformer {
    CVec w;
    bool rank_one_ok = false;
};

/// Direct w block of a feasible solver point, phase-rotated so k_p1p2^H w is
/// real nonnegative; flags whether the lifted matrix was numerically rank one.
ExtractedBeamformer extract_beamformer(const conic::SolverResult& res, const CVec& k_p1p2);

/// Exact constraint re-check at level gamma, independent of solver residuals.
bool post_verify_perfect(const CVec& w, const DerivedQuantities& dq,
                         const NetworkConfig& config, double gamma);

/// Closed-form worst-case re-check plus sampled perturbations from the
/// uncertainty set (all must keep the weighted SINRs above gamma and the
/// perturbed relay powers below the caps).
bool post_verify_robust(const CVec& w, const DerivedQuantities& dq_hat,
                        const NetworkConfig& config, const RobustConstants& rc,
                        const UncertaintyModel& um, double gamma);

}  // namespace relaybf
