#include "relaybf/robust.hpp"

#include <cmath>
#include <stdexcept>

#include "relaybf/rng.hpp"

namespace relaybf {

WorstCaseLinear worst_case_linear(const CVec& c, const CVec& a_hat, double eps) {
    if (c.size() != a_hat.size())
        throw std::invalid_argument("worst_case_linear: dimension mismatch");
    const double cn = c.norm();
    const Complex inner = c.dot(a_hat);  // c^H a_hat
    WorstCaseLinear out;
    out.value = std::abs(inner) + eps * cn;
    if (cn == 0.0 || eps == 0.0) {
        out.maximizer = CVec::Zero(c.size());
        return out;
    }
    const Complex phase = (inner == Complex(0.0)) ? Complex(1.0) : inner / std::abs(inner);
    out.maximizer = (eps / cn) * c * phase;
    return out;
}

double worst_case_scaled(const CVec& a_hat, double eps, const CMat& delta) {
    if (a_hat.size() != delta.rows())
        throw std::invalid_argument("worst_case_scaled: dimension mismatch");
    const double an = a_hat.norm();
    if (an == 0.0) {
        if (eps == 0.0) return 0.0;
        Eigen::JacobiSVD<CMat> svd(delta);
        return eps * svd.singularValues()(0);
    }
    const double base = (a_hat.adjoint() * delta).norm();
    return (1.0 + eps / an) * base;
}

namespace {

double kappa_user(const CVec& h_hat, double eps, const Vec& p_i, double zeta_hat) {
    const double hn = h_hat.norm();
    if (hn == 0.0) {
        if (eps == 0.0 || p_i.size() == 0) return 0.0;
        return eps * eps * p_i.maxCoeff();  // eps * sigma_max(P_I^{1/2}) squared
    }
    const double scale = 1.0 + eps / hn;
    return scale * scale * zeta_hat;  // zeta_hat = ||h_hat^H P_I^{1/2}||^2
}

}  // namespace

RobustConstants robust_constants(const UncertaintyModel& um, const NetworkConfig& config,
                                 const DerivedQuantities& dq_hat) {
    RobustConstants rc;
    for (int i = 0; i < 2; ++i) {
        rc.kappa_p[i] =
            kappa_user(um.estimates.h_p[i], um.eps_primary[i], dq_hat.p_i_diag, dq_hat.zeta_p[i]);
        rc.kappa_s[i] =
            kappa_user(um.estimates.h_s[i], um.eps_secondary[i], dq_hat.p_i_diag, dq_hat.zeta_s[i]);
    }
    const int nr = config.n_relays;
    const int ni = config.n_interferers;
    rc.kappa_r = Vec(nr);
    for (int j = 0; j < nr; ++j) {
        double v = dq_hat.chi_r(j);
        for (int l = 0; l < ni; ++l) {
            const double mag = std::abs(um.estimates.h_i[l](j)) + um.eps_interferer[l];
            v += config.p_interferer[l] * mag * mag;
        }
        rc.kappa_r(j) = v;
    }
    return rc;
}

ChannelSet sample_uncertainty(const UncertaintyModel& um, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x70737973ULL));
    ChannelSet cs = um.estimates;
    for (int i = 0; i < 2; ++i) {
        cs.h_p[i] += rng.ball_point(static_cast<int>(cs.h_p[i].size()), um.eps_primary[i]);
        cs.h_s[i] += rng.ball_point(static_cast<int>(cs.h_s[i].size()), um.eps_secondary[i]);
    }
    for (std::size_t l = 0; l < cs.h_i.size(); ++l)
        cs.h_i[l] += rng.ball_point(static_cast<int>(cs.h_i[l].size()), um.eps_interferer[l]);
    return cs;
}

}  // namespace relaybf
