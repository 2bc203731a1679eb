#include "relaybf/model.hpp"

#include <cmath>
#include <stdexcept>

#include "relaybf/rng.hpp"

namespace relaybf {

ChannelSet generate_channels(const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(derive_seed(seed, 0x6368616eULL));  // independent stream per purpose
    ChannelSet cs;
    // Fixed generation order; part of the determinism contract.
    for (int i = 0; i < 2; ++i) cs.f_p[i] = rng.cgaussian_vector(config.n_relays);
    for (int i = 0; i < 2; ++i) cs.f_s[i] = rng.cgaussian_vector(config.n_relays);
    for (int i = 0; i < 2; ++i) cs.h_p[i] = rng.cgaussian_vector(config.n_interferers);
    for (int i = 0; i < 2; ++i) cs.h_s[i] = rng.cgaussian_vector(config.n_interferers);
    cs.h_i.resize(config.n_interferers);
    for (int l = 0; l < config.n_interferers; ++l)
        cs.h_i[l] = rng.cgaussian_vector(config.n_relays);
    return cs;
}

namespace {

struct Perturbed {
    CVec estimate;
    double eps;
};

Perturbed perturb(const CVec& truth, const UncertaintySpec& mode, double eps_absolute,
                  Rng& rng) {
    const int n = static_cast<int>(truth.size());
    if (mode.kind == UncertaintySpec::Kind::absolute) {
        CVec delta = rng.ball_point(n, eps_absolute);
        return {truth - delta, eps_absolute};
    }
    const double rho = mode.rho;
    if (rho == 0.0) return {truth, 0.0};
    const double draw_radius = rho * truth.norm() / (1.0 - rho);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        CVec delta = rng.ball_point(n, draw_radius);
        CVec estimate = truth - delta;
        const double eps = rho * estimate.norm();
        if (delta.norm() <= eps) return {estimate, eps};
    }
    throw std::runtime_error("make_uncertainty: consistent fractional draw not found");
}

}  // namespace

UncertaintyModel make_uncertainty(const ChannelSet& truth, const NetworkConfig& config,
                                  const UncertaintySpec& mode, std::uint64_t seed) {
    config.validate();
    truth.validate(config);
    if (mode.kind == UncertaintySpec::Kind::fractional &&
        (mode.rho < 0.0 || mode.rho >= 1.0))
        throw std::invalid_argument("make_uncertainty: fractional rho must be in [0, 1)");

    Rng rng(derive_seed(seed, 0x756e6365ULL));
    UncertaintyModel um;
    um.estimates = truth;  // f-vectors stay exact
    um.eps_interferer.resize(config.n_interferers);
    for (int i = 0; i < 2; ++i) {
        auto p = perturb(truth.h_p[i], mode, config.eps_primary[i], rng);
        um.estimates.h_p[i] = p.estimate;
        um.eps_primary[i] = p.eps;
    }
    for (int i = 0; i < 2; ++i) {
        auto p = perturb(truth.h_s[i], mode, config.eps_secondary[i], rng);
        um.estimates.h_s[i] = p.estimate;
        um.eps_secondary[i] = p.eps;
    }
    for (int l = 0; l < config.n_interferers; ++l) {
        auto p = perturb(truth.h_i[l], mode, config.eps_interferer[l], rng);
        um.estimates.h_i[l] = p.estimate;
        um.eps_interferer[l] = p.eps;
    }
    um.truth = truth;
    return um;
}

DerivedQuantities derive(const NetworkConfig& config, const ChannelSet& channels) {
    config.validate();
    channels.validate(config);
    const int nr = config.n_relays;
    const int ni = config.n_interferers;
    const double sigma2 = config.noise_var;

    DerivedQuantities dq;
    dq.k_p1p2 = channels.f_p[0].cwiseProduct(channels.f_p[1]);
    dq.k_s1s2 = channels.f_s[0].cwiseProduct(channels.f_s[1]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            dq.k_sp[i][j] = channels.f_s[i].cwiseProduct(channels.f_p[j]);

    dq.p_i_diag = Vec(ni);
    for (int l = 0; l < ni; ++l) dq.p_i_diag(l) = config.p_interferer[l];

    auto symmetrize = [](CMat& m) { m = 0.5 * (m + m.adjoint()).eval(); };

    for (int j = 0; j < 2; ++j) {
        CMat t = CMat::Zero(nr, nr);
        for (int i = 0; i < 2; ++i) {
            const CVec& k = dq.k_sp[i][j];
            t += config.p_secondary[i] * (k * k.adjoint());
        }
        t += sigma2 * channels.f_p[j].cwiseAbs2().cast<Complex>().asDiagonal().toDenseMatrix();
        CMat q = t;
        for (int l = 0; l < ni; ++l) {
            const CVec fh = channels.f_p[j].cwiseProduct(channels.h_i[l]);
            q += config.p_interferer[l] * (fh * fh.adjoint());
        }
        symmetrize(t);
        symmetrize(q);
        dq.t_p[j] = t;
        dq.q_p[j] = q;
    }
    for (int j = 0; j < 2; ++j) {
        CMat t = CMat::Zero(nr, nr);
        for (int i = 0; i < 2; ++i) {
            const CVec& k = dq.k_sp[j][i];
            t += config.p_primary[i] * (k * k.adjoint());
        }
        t += sigma2 * channels.f_s[j].cwiseAbs2().cast<Complex>().asDiagonal().toDenseMatrix();
        CMat q = t;
        for (int l = 0; l < ni; ++l) {
            const CVec fh = channels.f_s[j].cwiseProduct(channels.h_i[l]);
            q += config.p_interferer[l] * (fh * fh.adjoint());
        }
        symmetrize(t);
        symmetrize(q);
        dq.t_s[j] = t;
        dq.q_s[j] = q;
    }

    for (int i = 0; i < 2; ++i) {
        double zp = 0.0, zs = 0.0;
        for (int l = 0; l < ni; ++l) {
            zp += config.p_interferer[l] * std::norm(channels.h_p[i](l));
            zs += config.p_interferer[l] * std::norm(channels.h_s[i](l));
        }
        dq.zeta_p[i] = zp;
        dq.zeta_s[i] = zs;
    }

    dq.xi_r = Vec(nr);
    dq.chi_r = Vec(nr);
    for (int j = 0; j < nr; ++j) {
        double chi = sigma2;
        for (int i = 0; i < 2; ++i) {
            chi += config.p_primary[i] * std::norm(channels.f_p[i](j));
            chi += config.p_secondary[i] * std::norm(channels.f_s[i](j));
        }
        double xi = chi;
        for (int l = 0; l < ni; ++l)
            xi += config.p_interferer[l] * std::norm(channels.h_i[l](j));
        dq.chi_r(j) = chi;
        dq.xi_r(j) = xi;
    }
    return dq;
}

}  // namespace relaybf
