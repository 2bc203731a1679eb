#pragma once

#include <cstdint>
#include <utility>

#include "relaybf/types.hpp"

namespace relaybf {

/// Closed-form worst-case constants absorbing the interferer-CSI uncertainty.
struct RobustConstants {
    std::array<double, 2> kappa_p{0.0, 0.0};
    std::array<double, 2> kappa_s{0.0, 0.0};
    Vec kappa_r;
};

struct WorstCaseLinear {
    double value;
    CVec maximizer;
};

/// max over ||b|| <= eps of |c^H (a_hat + b)|, together with the achieving b.
WorstCaseLinear worst_case_linear(const CVec& c, const CVec& a_hat, double eps);

/// (1 + eps/||a_hat||) * ||a_hat^H Delta||. For a_hat = 0 with eps > 0 the
/// formula degenerates; the exact supremum eps * sigma_max(Delta) is
/// substituted instead.
double worst_case_scaled(const CVec& a_hat, double eps, const CMat& delta);

/// kappa constants from the estimated channels and their error radii.
/// dq_hat must be derived from um.estimates.
RobustConstants robust_constants(const UncertaintyModel& um, const NetworkConfig& config,
                                 const DerivedQuantities& dq_hat);

/// One sample from the uncertainty set: estimates plus independent
/// uniform-in-ball perturbations of every interferer-side vector.
ChannelSet sample_uncertainty(const UncertaintyModel& um, std::uint64_t seed);

}  // namespace relaybf
