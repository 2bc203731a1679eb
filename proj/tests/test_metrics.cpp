#include <doctest.h>

#include <cmath>

#include "relaybf/metrics.hpp"
#include "relaybf/model.hpp"
#include "relaybf/rng.hpp"
#include "support/test_instances.hpp"

using namespace relaybf;

namespace {

// Relay-transmit-power oracle: directly simulates the first hop and the
// per-relay amplify-and-forward output power.
Vec simulated_relay_powers(const CVec& w, const ChannelSet& cs, const NetworkConfig& cfg,
                           long n_symbols, std::uint64_t seed) {
    Rng rng(seed);
    const int nr = cfg.n_relays;
    Vec acc = Vec::Zero(nr);
    const double sigma = std::sqrt(cfg.noise_var);
    for (long t = 0; t < n_symbols; ++t) {
        CVec r = CVec::Zero(nr);
        for (int i = 0; i < 2; ++i) {
            r += std::sqrt(cfg.p_primary[i]) * cs.f_p[i] * rng.unit_symbol();
            r += std::sqrt(cfg.p_secondary[i]) * cs.f_s[i] * rng.unit_symbol();
        }
        for (int l = 0; l < cfg.n_interferers; ++l)
            r += std::sqrt(cfg.p_interferer[l]) * cs.h_i[l] * rng.unit_symbol();
        for (int j = 0; j < nr; ++j) r(j) += sigma * rng.cgaussian();
        for (int j = 0; j < nr; ++j) acc(j) += std::norm(std::conj(w(j)) * r(j));
    }
    return acc / static_cast<double>(n_symbols);
}

}  // namespace

TEST_CASE("relay_powers basics") {
    auto cfg = testing::default_config(3, 1);
    ChannelSet cs = generate_channels(cfg, 2);
    DerivedQuantities dq = derive(cfg, cs);
    CHECK(relay_powers(CVec::Zero(3), dq).norm() == 0.0);

    ChannelSet zero;
    for (int i = 0; i < 2; ++i) {
        zero.f_p[i] = CVec::Zero(3);
        zero.f_s[i] = CVec::Zero(3);
        zero.h_p[i] = CVec::Zero(1);
        zero.h_s[i] = CVec::Zero(1);
    }
    zero.h_i.assign(1, CVec::Zero(3));
    DerivedQuantities dq0 = derive(cfg, zero);
    CVec e1 = CVec::Zero(3);
    e1(1) = 1.0;
    Vec p = relay_powers(e1, dq0);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == doctest::Approx(cfg.noise_var));
    CHECK(p(2) == 0.0);
}

TEST_CASE("relay_powers matches the symbol-level oracle") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet cs = generate_channels(cfg, 17);
    DerivedQuantities dq = derive(cfg, cs);
    Rng rng(5);
    CVec w = rng.cgaussian_vector(4);
    Vec analytic = relay_powers(w, dq);
    Vec simulated = simulated_relay_powers(w, cs, cfg, 1000000, 99);
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(simulated(j) - analytic(j)) / analytic(j) < 0.01);
}

TEST_CASE("relay_powers scales quadratically") {
    auto cfg = testing::default_config(5, 2);
    ChannelSet cs = generate_channels(cfg, 3);
    DerivedQuantities dq = derive(cfg, cs);
    Rng rng(7);
    CVec w = rng.cgaussian_vector(5);
    const Complex c(0.3, -1.2);
    Vec lhs = relay_powers(c * w, dq);
    Vec rhs = std::norm(c) * relay_powers(w, dq);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * rhs.maxCoeff());
}

TEST_CASE("sinr zero beamformer and phase invariance") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet cs = generate_channels(cfg, 21);
    DerivedQuantities dq = derive(cfg, cs);
    CHECK(sinr(CVec::Zero(4), dq, User::P1, cfg) == 0.0);
    Rng rng(2);
    CVec w = rng.cgaussian_vector(4);
    for (double theta : {0.3, 1.2, 2.9, 5.5}) {
        const CVec rotated = std::polar(1.0, theta) * w;
        for (User u : {User::P1, User::P2, User::S1, User::S2}) {
            const double a = sinr(w, dq, u, cfg);
            const double b = sinr(rotated, dq, u, cfg);
            CHECK(std::abs(a - b) <= 1e-12 * a);
        }
    }
}

TEST_CASE("objective is the weighted minimum") {
    auto cfg = testing::default_config(4, 2);
    cfg.mu = 2.5;
    ChannelSet cs = generate_channels(cfg, 31);
    DerivedQuantities dq = derive(cfg, cs);
    CHECK(objective(CVec::Zero(4), dq, cfg) == 0.0);
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        CVec w = rng.cgaussian_vector(4);
        double expect = sinr(w, dq, User::P1, cfg);
        expect = std::min(expect, sinr(w, dq, User::P2, cfg));
        expect = std::min(expect, cfg.mu * sinr(w, dq, User::S1, cfg));
        expect = std::min(expect, cfg.mu * sinr(w, dq, User::S2, cfg));
        CHECK(objective(w, dq, cfg) == doctest::Approx(expect).epsilon(1e-15));
    }
}

TEST_CASE("objective under symmetric channels with mu one") {
    auto cfg = testing::default_config(4, 0, 1.0);
    ChannelSet cs = generate_channels(cfg, 8);
    cs.f_s[0] = cs.f_p[0];
    cs.f_s[1] = cs.f_p[1];
    DerivedQuantities dq = derive(cfg, cs);
    Rng rng(4);
    CVec w = rng.cgaussian_vector(4);
    CHECK(sinr(w, dq, User::P1, cfg) ==
          doctest::Approx(sinr(w, dq, User::S1, cfg)).epsilon(1e-12));
    CHECK(sinr(w, dq, User::P2, cfg) ==
          doctest::Approx(sinr(w, dq, User::S2, cfg)).epsilon(1e-12));
}

TEST_CASE("rate fixed points and monotonicity") {
    CHECK(rate(0.0) == 0.0);
    CHECK(rate(1.0) == doctest::Approx(1.0));
    CHECK(rate(3.0) == doctest::Approx(2.0));
    CHECK_THROWS(rate(-0.1));
    double prev = -1.0;
    for (double s = 0.0; s < 10.0; s += 0.37) {
        const double r = rate(s);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("empirical_sinr agrees with the analytic formula") {
    auto cfg = testing::default_config(4, 2);
    ChannelSet cs = generate_channels(cfg, 77);
    DerivedQuantities dq = derive(cfg, cs);
    Rng rng(9);
    CVec w = rng.cgaussian_vector(4);
    EmpiricalSinr emp = empirical_sinr(w, cs, cfg, 1000000, 123);
    int within = 0;
    for (int u = 0; u < 4; ++u) {
        const double analytic = sinr(w, dq, static_cast<User>(u), cfg);
        if (std::abs(analytic - emp.estimate[u]) <= 3.0 * emp.std_error[u]) ++within;
    }
    CHECK(within >= 3);  // one 3-sigma miss tolerated
}

TEST_CASE("empirical_sinr in a clean single-relay setup") {
    NetworkConfig cfg;
    cfg.n_relays = 1;
    cfg.n_interferers = 0;
    cfg.noise_var = 1e-12;
    cfg.mu = 1.0;
    cfg.p_relay_max = {1.0};
    ChannelSet cs;
    for (int i = 0; i < 2; ++i) {
        cs.f_p[i] = CVec::Ones(1);
        cs.f_s[i] = CVec::Ones(1);
        cs.h_p[i] = CVec(0);
        cs.h_s[i] = CVec(0);
    }
    DerivedQuantities dq = derive(cfg, cs);
    CVec w = CVec::Ones(1);
    const double analytic = sinr(w, dq, User::P1, cfg);
    CHECK(analytic == doctest::Approx(0.5).epsilon(1e-6));  // both secondaries interfere
    EmpiricalSinr emp = empirical_sinr(w, cs, cfg, 1000000, 4);
    CHECK(std::abs(emp.estimate[0] - analytic) / analytic < 0.01);
}

TEST_CASE("empirical_sinr with zero beamformer has zero desired power") {
    auto cfg = testing::default_config(3, 1);
    ChannelSet cs = generate_channels(cfg, 6);
    EmpiricalSinr emp = empirical_sinr(CVec::Zero(3), cs, cfg, 2000, 8);
    for (int u = 0; u < 4; ++u) CHECK(emp.estimate[u] == 0.0);
}

TEST_CASE("empirical_sinr validates the symbol budget") {
    auto cfg = testing::default_config(3, 1);
    ChannelSet cs = generate_channels(cfg, 6);
    CHECK_THROWS(empirical_sinr(CVec::Zero(3), cs, cfg, 100, 8));
}
