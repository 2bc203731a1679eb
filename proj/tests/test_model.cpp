#include <doctest.h>

#include <cmath>
#include <complex>

#include "relaybf/model.hpp"
#include "relaybf/rng.hpp"
#include "support/test_instances.hpp"

using namespace relaybf;

namespace {

bool identical(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a(i) != b(i)) return false;
    return true;
}

bool identical(const ChannelSet& a, const ChannelSet& b) {
    for (int i = 0; i < 2; ++i) {
        if (!identical(a.f_p[i], b.f_p[i]) || !identical(a.f_s[i], b.f_s[i]) ||
            !identical(a.h_p[i], b.h_p[i]) || !identical(a.h_s[i], b.h_s[i]))
            return false;
    }
    for (std::size_t l = 0; l < a.h_i.size(); ++l)
        if (!identical(a.h_i[l], b.h_i[l])) return false;
    return true;
}

// Term-by-term recomputation of the interference covariance with plain
// loops, independent of the Eigen expressions in the library.
CMat naive_q_p(const NetworkConfig& cfg, const ChannelSet& cs, int j) {
    const int nr = cfg.n_relays;
    CMat q = CMat::Zero(nr, nr);
    for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < nr; ++a)
            for (int b = 0; b < nr; ++b) {
                const Complex ka = cs.f_s[i](a) * cs.f_p[j](a);
                const Complex kb = cs.f_s[i](b) * cs.f_p[j](b);
                q(a, b) += cfg.p_secondary[i] * ka * std::conj(kb);
            }
    }
    for (int a = 0; a < nr; ++a) q(a, a) += cfg.noise_var * std::norm(cs.f_p[j](a));
    for (int l = 0; l < cfg.n_interferers; ++l) {
        for (int a = 0; a < nr; ++a)
            for (int b = 0; b < nr; ++b) {
                const Complex fa = cs.f_p[j](a) * cs.h_i[l](a);
                const Complex fb = cs.f_p[j](b) * cs.h_i[l](b);
                q(a, b) += cfg.p_interferer[l] * fa * std::conj(fb);
            }
    }
    return q;
}

}  // namespace

TEST_CASE("generate_channels draws unit-variance entries") {
    auto cfg = testing::default_config(10, 2);
    double sum_sq = 0.0, sum_re = 0.0, sum_im = 0.0;
    long count = 0;
    for (int seed = 0; seed < 1500; ++seed) {
        ChannelSet cs = generate_channels(cfg, seed);
        auto absorb = [&](const CVec& v) {
            for (int i = 0; i < v.size(); ++i) {
                sum_sq += std::norm(v(i));
                sum_re += v(i).real() * v(i).real();
                sum_im += v(i).imag() * v(i).imag();
                ++count;
            }
        };
        for (int i = 0; i < 2; ++i) {
            absorb(cs.f_p[i]);
            absorb(cs.f_s[i]);
            absorb(cs.h_p[i]);
            absorb(cs.h_s[i]);
        }
        for (const auto& h : cs.h_i) absorb(h);
    }
    const double n = static_cast<double>(count);
    REQUIRE(count > 100000);
    // |h|^2 has unit mean and unit variance; 3 sigma of the estimator
    CHECK(std::abs(sum_sq / n - 1.0) < 3.0 / std::sqrt(n));
    // each part has variance 1/2 (fourth moment of N(0,1/2) gives sd sqrt(2)/2)
    CHECK(std::abs(sum_re / n - 0.5) < 3.0 * std::sqrt(0.5) / std::sqrt(n));
    CHECK(std::abs(sum_im / n - 0.5) < 3.0 * std::sqrt(0.5) / std::sqrt(n));
}

TEST_CASE("generate_channels is a pure function of config and seed") {
    auto cfg = testing::default_config(6, 2);
    CHECK(identical(generate_channels(cfg, 7), generate_channels(cfg, 7)));
    CHECK_FALSE(identical(generate_channels(cfg, 1), generate_channels(cfg, 2)));
}

TEST_CASE("make_uncertainty with zero radius returns the truth") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet truth = generate_channels(cfg, 3);
    UncertaintyModel um =
        make_uncertainty(truth, cfg, UncertaintySpec::fractional(0.0), 11);
    CHECK(identical(um.estimates, truth));
    CHECK(um.eps_primary[0] == 0.0);
    CHECK(um.eps_interferer[1] == 0.0);
}

TEST_CASE("make_uncertainty keeps the truth inside every error ball") {
    auto cfg = testing::default_config(4, 2);
    for (int seed = 0; seed < 50; ++seed) {
        ChannelSet truth = generate_channels(cfg, 100 + seed);
        UncertaintyModel um =
            make_uncertainty(truth, cfg, UncertaintySpec::fractional(0.1), seed);
        for (int i = 0; i < 2; ++i) {
            CHECK((truth.h_p[i] - um.estimates.h_p[i]).norm() <=
                  um.eps_primary[i] * (1 + 1e-12));
            CHECK((truth.h_s[i] - um.estimates.h_s[i]).norm() <=
                  um.eps_secondary[i] * (1 + 1e-12));
            CHECK(identical(truth.f_p[i], um.estimates.f_p[i]));
            CHECK(identical(truth.f_s[i], um.estimates.f_s[i]));
        }
        for (int l = 0; l < cfg.n_interferers; ++l)
            CHECK((truth.h_i[l] - um.estimates.h_i[l]).norm() <=
                  um.eps_interferer[l] * (1 + 1e-12));
    }
}

TEST_CASE("make_uncertainty draws saturate the error ball") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet truth = generate_channels(cfg, 5);
    double max_ratio = 0.0;
    for (int seed = 0; seed < 1000; ++seed) {
        UncertaintyModel um =
            make_uncertainty(truth, cfg, UncertaintySpec::fractional(0.1), seed);
        for (int l = 0; l < cfg.n_interferers; ++l) {
            const double d = (truth.h_i[l] - um.estimates.h_i[l]).norm();
            if (um.eps_interferer[l] > 0.0)
                max_ratio = std::max(max_ratio, d / um.eps_interferer[l]);
        }
    }
    CHECK(max_ratio >= 0.9);
    CHECK(max_ratio <= 1.0 + 1e-12);
}

TEST_CASE("make_uncertainty rejects fractional rho at or above one") {
    auto cfg = testing::default_config(3, 1);
    ChannelSet truth = generate_channels(cfg, 1);
    CHECK_THROWS(make_uncertainty(truth, cfg, UncertaintySpec::fractional(1.0), 1));
}

TEST_CASE("derive elementwise products on basis vectors") {
    auto cfg = testing::default_config(3, 0);
    ChannelSet cs = generate_channels(cfg, 1);
    cs.f_p[0] = CVec::Zero(3);
    cs.f_p[0](0) = 1.0;
    cs.f_p[1] = cs.f_p[0];
    DerivedQuantities dq = derive(cfg, cs);
    CHECK(std::abs(dq.k_p1p2(0) - Complex(1.0)) < 1e-15);
    CHECK(std::abs(dq.k_p1p2(1)) == 0.0);
    CHECK(std::abs(dq.k_p1p2(2)) == 0.0);
}

TEST_CASE("derive with all-zero channels keeps only the noise terms") {
    auto cfg = testing::default_config(3, 2);
    ChannelSet cs;
    for (int i = 0; i < 2; ++i) {
        cs.f_p[i] = CVec::Zero(3);
        cs.f_s[i] = CVec::Zero(3);
        cs.h_p[i] = CVec::Zero(2);
        cs.h_s[i] = CVec::Zero(2);
    }
    cs.h_i.assign(2, CVec::Zero(3));
    DerivedQuantities dq = derive(cfg, cs);
    for (int j = 0; j < 3; ++j) {
        CHECK(dq.xi_r(j) == doctest::Approx(cfg.noise_var));
        CHECK(dq.chi_r(j) == doctest::Approx(cfg.noise_var));
    }
    CHECK(dq.zeta_p[0] == 0.0);
    CHECK(dq.zeta_s[1] == 0.0);
    CHECK(dq.q_p[0].norm() == 0.0);
    CHECK(dq.q_s[1].norm() == 0.0);
}

TEST_CASE("derive matches a term-by-term oracle") {
    auto cfg = testing::default_config(4, 2);
    cfg.p_primary = {1.3, 0.8};
    cfg.p_secondary = {0.9, 1.1};
    cfg.p_interferer = {0.5, 1.7};
    for (int seed = 0; seed < 10; ++seed) {
        ChannelSet cs = generate_channels(cfg, seed);
        DerivedQuantities dq = derive(cfg, cs);
        for (int j = 0; j < 2; ++j) {
            CMat q = naive_q_p(cfg, cs, j);
            CHECK((q - dq.q_p[j]).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("derived matrices are Hermitian and nearly PSD") {
    auto cfg = testing::default_config(5, 2);
    for (int seed = 0; seed < 10; ++seed) {
        ChannelSet cs = generate_channels(cfg, 40 + seed);
        DerivedQuantities dq = derive(cfg, cs);
        for (const auto* m :
             {&dq.q_p[0], &dq.q_p[1], &dq.q_s[0], &dq.q_s[1], &dq.t_p[0], &dq.t_p[1],
              &dq.t_s[0], &dq.t_s[1]}) {
            CHECK((*m - m->adjoint()).cwiseAbs().maxCoeff() == 0.0);
            Eigen::SelfAdjointEigenSolver<CMat> eig(*m, Eigen::EigenvaluesOnly);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
        }
    }
}

TEST_CASE("interferer terms split out of q and xi") {
    auto cfg = testing::default_config(5, 3);
    cfg.p_interferer = {0.4, 1.2, 2.0};
    cfg.eps_interferer.assign(3, 0.0);
    ChannelSet cs = generate_channels(cfg, 9);
    DerivedQuantities dq = derive(cfg, cs);
    for (int i = 0; i < 2; ++i) {
        CMat expected = CMat::Zero(5, 5);
        for (int l = 0; l < 3; ++l) {
            CVec fh = cs.f_p[i].cwiseProduct(cs.h_i[l]);
            expected += cfg.p_interferer[l] * (fh * fh.adjoint());
        }
        CHECK((dq.q_p[i] - dq.t_p[i] - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int j = 0; j < 5; ++j) {
        double expected = 0.0;
        for (int l = 0; l < 3; ++l)
            expected += cfg.p_interferer[l] * std::norm(cs.h_i[l](j));
        CHECK(dq.xi_r(j) - dq.chi_r(j) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(dq.xi_r(j) >= cfg.noise_var);
        CHECK(dq.chi_r(j) >= cfg.noise_var);
    }
}

TEST_CASE("derive rejects mismatched dimensions") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet cs = generate_channels(cfg, 1);
    cs.f_p[0] = CVec::Zero(3);
    CHECK_THROWS(derive(cfg, cs));
}
