#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace relaybf {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Scalar parameters of the two-way relay network. All powers are linear
/// scale; dBm conversion happens in the experiment layer only.
struct NetworkConfig {
    int n_relays = 0;
    int n_interferers = 0;
    std::array<double, 2> p_primary{1.0, 1.0};
    std::array<double, 2> p_secondary{1.0, 1.0};
    std::vector<double> p_interferer;
    double noise_var = 1.0;
    double mu = 1.0;
    std::vector<double> p_relay_max;
    std::array<double, 2> eps_primary{0.0, 0.0};
    std::array<double, 2> eps_secondary{0.0, 0.0};
    std::vector<double> eps_interferer;

    /// Throws std::invalid_argument when a field is out of range or a
    /// per-relay / per-interferer list has the wrong length.
    void validate() const;
};

/// Flat-fading channel coefficients for one realization.
///   f_p[i], f_s[i] : transceiver i <-> relays        (length n_relays)
///   h_p[i], h_s[i] : interferers  <-> transceiver i  (length n_interferers)
///   h_i[l]         : interferer l <-> relays         (length n_relays)
struct ChannelSet {
    std::array<CVec, 2> f_p;
    std::array<CVec, 2> f_s;
    std::array<CVec, 2> h_p;
    std::array<CVec, 2> h_s;
    std::vector<CVec> h_i;

    void validate(const NetworkConfig& config) const;
};

/// Estimated interferer-side channels together with the norm radii that
/// bound the estimation error. Transceiver-relay channels are exact copies.
struct UncertaintyModel {
    ChannelSet estimates;
    std::array<double, 2> eps_primary{0.0, 0.0};
    std::array<double, 2> eps_secondary{0.0, 0.0};
    std::vector<double> eps_interferer;
    std::optional<ChannelSet> truth;  // kept on validation runs only
};

/// Everything the SINR expressions and constraints consume, precomputed from
/// one ChannelSet. q/t matrices are Hermitian-symmetrized on construction.
struct DerivedQuantities {
    CVec k_p1p2;
    CVec k_s1s2;
    std::array<std::array<CVec, 2>, 2> k_sp;  // k_sp[i][j]: secondary i, primary j
    std::array<CMat, 2> q_p, q_s;             // full interference covariances
    std::array<CMat, 2> t_p, t_s;             // q without the interferer terms
    std::array<double, 2> zeta_p{}, zeta_s{};
    Vec xi_r;   // per-relay transmit power factor
    Vec chi_r;  // xi without the interferer terms
    Vec p_i_diag;
};

/// Result of one optimization run.
struct BeamformingSolution {
    CVec w;
    double gamma = 0.0;
    std::array<double, 2> sinr_p{0.0, 0.0};
    std::array<double, 2> sinr_s{0.0, 0.0};
    Vec relay_power;
    bool rank_one_ok = false;
    int iterations = 0;
    std::string diagnostic;  // empty on a normal run
};

}  // namespace relaybf
