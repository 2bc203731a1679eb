#include "relaybf/feasibility.hpp"

#include <algorithm>
#include <stdexcept>

namespace relaybf {

namespace {

constexpr double kFeasibilityTol = 1e-9;  // relative to a^H Delta^{-1} a

// a^H M^{-1} a via LLT; retries with a small ridge when M is numerically
// singular (possible only for degenerate channels).
double inverse_quad_form(const CMat& m, const CVec& a, bool allow_ridge) {
    Eigen::LLT<CMat> llt(m);
    if (llt.info() == Eigen::Success) {
        return a.dot(llt.solve(a)).real();
    }
    if (!allow_ridge) throw std::invalid_argument("matrix is not positive definite");
    const double base = 1e-12 * m.real().trace() / static_cast<double>(m.rows());
    double ridge = std::max(base, 1e-300);
    for (int attempt = 0; attempt < 8; ++attempt) {
        CMat reg = m + ridge * CMat::Identity(m.rows(), m.cols());
        Eigen::LLT<CMat> retry(reg);
        if (retry.info() == Eigen::Success) return a.dot(retry.solve(a)).real();
        ridge *= 100.0;
    }
    throw std::invalid_argument("matrix is singular beyond regularization");
}

}  // namespace

bool lemma1_feasible(const CMat& delta, const CVec& a, double t) {
    if (delta.rows() != delta.cols() || delta.rows() != a.size())
        throw std::invalid_argument("lemma1_feasible: dimension mismatch");
    if (t <= 0.0) throw std::invalid_argument("lemma1_feasible: t must be positive");
    const double value = inverse_quad_form(delta, a, false);
    return value - t > kFeasibilityTol * value;
}

std::array<double, 4> gamma_upper_bound_terms(const DerivedQuantities& dq,
                                              const NetworkConfig& config) {
    std::array<double, 4> terms{};
    for (int i = 0; i < 2; ++i) {
        terms[i] = config.p_primary[1 - i] * inverse_quad_form(dq.q_p[i], dq.k_p1p2, true);
        terms[2 + i] = config.mu * config.p_secondary[1 - i] *
                       inverse_quad_form(dq.q_s[i], dq.k_s1s2, true);
    }
    return terms;
}

double gamma_upper_bound(const DerivedQuantities& dq, const NetworkConfig& config) {
    const auto terms = gamma_upper_bound_terms(dq, config);
    return *std::min_element(terms.begin(), terms.end());
}

}  // namespace relaybf
