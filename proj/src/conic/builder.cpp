#include "relaybf/conic/builder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "relaybf/lift.hpp"

namespace relaybf::conic {

namespace {

// Coefficient rows over the lifted w block for Re(k^H w) and Im(k^H w).
Eigen::RowVectorXd re_inner_row(const CVec& k, int n_vars, int w_offset) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_vars);
    const int n = static_cast<int>(k.size());
    row.segment(w_offset, n) = k.real().transpose();
    row.segment(w_offset + n, n) = k.imag().transpose();
    return row;
}

Eigen::RowVectorXd im_inner_row(const CVec& k, int n_vars, int w_offset) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_vars);
    const int n = static_cast<int>(k.size());
    row.segment(w_offset, n) = -k.imag().transpose();
    row.segment(w_offset + n, n) = k.real().transpose();
    return row;
}

// Coefficients over the Hermitian parameterization of omega for the real
// functional k^H omega k.
Eigen::RowVectorXd omega_quad_row(const CVec& k, int n_vars, const VarLayout& layout) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_vars);
    const int n = static_cast<int>(k.size());
    for (int j = 0; j < n; ++j) {
        row(layout.omega_real_index(j, j)) = std::norm(k(j));
        for (int i = 0; i < j; ++i) {
            const Complex c = std::conj(k(i)) * k(j);
            row(layout.omega_real_index(i, j)) = 2.0 * c.real();
            row(layout.omega_imag_index(i, j)) = -2.0 * c.imag();
        }
    }
    return row;
}

// Writes map rows [rows, rows + 2n) as the lifted action of the complex
// matrix m on the w block.
void put_lifted_matrix(Mat& map, int first_row, const CMat& m, int w_offset) {
    const int n = static_cast<int>(m.rows());
    map.block(first_row, w_offset, n, n) = m.real();
    map.block(first_row, w_offset + n, n, n) = -m.imag();
    map.block(first_row + n, w_offset, n, n) = m.imag();
    map.block(first_row + n, w_offset + n, n, n) = m.real();
}

void add_phase_normalization(ConicProblem& p, const CVec& k_p) {
    LinearRow im;
    im.a = im_inner_row(k_p, p.n_vars, p.layout.w_offset);
    im.sense = Sense::eq;
    im.rhs = 0.0;
    im.label = "phase_normalization_im";
    p.linear.push_back(std::move(im));
    LinearRow re;
    re.a = -re_inner_row(k_p, p.n_vars, p.layout.w_offset);
    re.sense = Sense::le;
    re.rhs = 0.0;
    re.label = "phase_normalization_re";
    p.linear.push_back(std::move(re));
}

// sqrt(scale) * |w_j| <= sqrt(cap) as a 3-dim cone.
void add_relay_caps(ConicProblem& p, const Vec& scale, const NetworkConfig& config) {
    const int nr = config.n_relays;
    for (int j = 0; j < nr; ++j) {
        SocBlock soc;
        soc.map = Mat::Zero(3, p.n_vars);
        soc.offset = Vec::Zero(3);
        soc.offset(0) = std::sqrt(config.p_relay_max[j]);
        const double root = std::sqrt(scale(j));
        soc.map(1, p.layout.w_offset + j) = root;
        soc.map(2, p.layout.w_offset + nr + j) = root;
        soc.label = "relay_cap[" + std::to_string(j) + "]";
        p.socs.push_back(std::move(soc));
    }
}

// Schur block [[omega, w], [w^H, 1]] >= 0 in lifted coordinates.
void add_schur_coupling(ConicProblem& p) {
    const int n = p.layout.n_relays;
    const int d = n + 1;  // complex block dimension
    PsdBlock psd;
    psd.dim = 2 * d;
    psd.constant.emplace_back(n, n, 1.0);
    psd.constant.emplace_back(d + n, d + n, 1.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            auto& re = psd.coeff[p.layout.omega_real_index(i, j)];
            re.emplace_back(i, j, 1.0);
            re.emplace_back(d + i, d + j, 1.0);
            if (i != j) {
                re.emplace_back(j, i, 1.0);
                re.emplace_back(d + j, d + i, 1.0);
                auto& im = psd.coeff[p.layout.omega_imag_index(i, j)];
                im.emplace_back(d + i, j, 1.0);
                im.emplace_back(j, d + i, 1.0);
                im.emplace_back(i, d + j, -1.0);
                im.emplace_back(d + j, i, -1.0);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        auto& re = psd.coeff[p.layout.w_offset + i];
        re.emplace_back(i, n, 1.0);
        re.emplace_back(n, i, 1.0);
        re.emplace_back(d + i, d + n, 1.0);
        re.emplace_back(d + n, d + i, 1.0);
        auto& im = psd.coeff[p.layout.w_offset + n + i];
        im.emplace_back(d + i, n, 1.0);
        im.emplace_back(n, d + i, 1.0);
        im.emplace_back(i, d + n, -1.0);
        im.emplace_back(d + n, i, -1.0);
    }
    psd.label = "schur_coupling";
    p.psds.push_back(std::move(psd));
}

void set_trace_cost(ConicProblem& p) {
    p.cost = Vec::Zero(p.n_vars);
    for (int i = 0; i < p.layout.n_relays; ++i)
        p.cost(p.layout.omega_real_index(i, i)) = 1.0;
}

int rho_index(const VarLayout& layout, bool primary, int i) {
    return layout.rho_offset + (primary ? 0 : 2) + i;
}

int varrho_index(const VarLayout& layout, bool primary, int i, int l,
                 int n_interferers) {
    return layout.varrho_offset + ((primary ? 0 : 2) + i) * n_interferers + l;
}

// One scaled worst-case interference row: sqrt(p) * (varrho + eps * rho).
void put_pi_row(Mat& map, int row, const VarLayout& layout, bool primary, int i, int l,
                double p_l, double eps_l, int n_interferers) {
    const double root = std::sqrt(p_l);
    map(row, varrho_index(layout, primary, i, l, n_interferers)) = root;
    map(row, rho_index(layout, primary, i)) = root * eps_l;
}

// || w^H F || <= rho and |w^H F h_hat_l| <= varrho_l for one transceiver.
void add_aux_norm_bounds(ConicProblem& p, bool primary, int i, const CVec& f,
                         const std::vector<CVec>& h_hat, const std::string& who) {
    const int nr = p.layout.n_relays;
    const int ni = p.layout.n_interferers;
    {
        SocBlock soc;
        soc.map = Mat::Zero(1 + 2 * nr, p.n_vars);
        soc.offset = Vec::Zero(1 + 2 * nr);
        soc.map(0, rho_index(p.layout, primary, i)) = 1.0;
        put_lifted_matrix(soc.map, 1, CMat(f.conjugate().asDiagonal()), p.layout.w_offset);
        soc.label = "relayed_norm_bound[" + who + "]";
        p.socs.push_back(std::move(soc));
    }
    for (int l = 0; l < ni; ++l) {
        const CVec g = f.cwiseProduct(h_hat[l]);
        SocBlock soc;
        soc.map = Mat::Zero(3, p.n_vars);
        soc.offset = Vec::Zero(3);
        soc.map(0, varrho_index(p.layout, primary, i, l, ni)) = 1.0;
        soc.map.row(1) = re_inner_row(g, p.n_vars, p.layout.w_offset);
        soc.map.row(2) = im_inner_row(g, p.n_vars, p.layout.w_offset);
        soc.label = "relayed_interferer_bound[" + who + "," + std::to_string(l) + "]";
        p.socs.push_back(std::move(soc));
    }
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("builder: gamma must be positive");
}

}  // namespace

ConicProblem build_perfect(const DerivedQuantities& dq, const NetworkConfig& config,
                           double gamma) {
    check_gamma(gamma);
    config.validate();
    const int nr = config.n_relays;
    ConicProblem p;
    p.layout.n_relays = nr;
    p.layout.n_interferers = config.n_interferers;
    p.layout.w_offset = 0;
    p.layout.omega_offset = 2 * nr;
    p.n_vars = 2 * nr + p.layout.omega_var_count();
    set_trace_cost(p);

    add_phase_normalization(p, dq.k_p1p2);

    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.p_primary[1 - i] / gamma) *
                         re_inner_row(dq.k_p1p2, p.n_vars, p.layout.w_offset);
        put_lifted_matrix(soc.map, 1, hermitian_sqrt(dq.q_p[i]), p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(dq.zeta_p[i] + config.noise_var);
        soc.label = "primary_sinr_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    const Eigen::RowVectorXd omega_num = omega_quad_row(dq.k_s1s2, p.n_vars, p.layout);
    {
        LinearRow nonneg;
        nonneg.a = -omega_num;
        nonneg.sense = Sense::le;
        nonneg.rhs = 0.0;
        nonneg.label = "secondary_numerator_nonneg";
        p.linear.push_back(std::move(nonneg));
    }
    for (int i = 0; i < 2; ++i) {
        const double factor = config.mu * config.p_secondary[1 - i] / gamma;
        const double shift = dq.zeta_s[i] + config.noise_var;
        SocBlock soc;
        const int dim = 2 + 2 * nr;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = factor * omega_num;
        soc.offset(0) = 1.0 - shift;
        soc.map.row(1) = -factor * omega_num;
        soc.offset(1) = 1.0 + shift;
        put_lifted_matrix(soc.map, 2, 2.0 * hermitian_sqrt(dq.q_s[i]), p.layout.w_offset);
        soc.label = "secondary_sinr_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    add_relay_caps(p, dq.xi_r, config);
    add_schur_coupling(p);
    return p;
}

ConicProblem build_robust(const DerivedQuantities& dq_hat, const NetworkConfig& config,
                          const RobustConstants& rc, const UncertaintyModel& um,
                          double gamma) {
    check_gamma(gamma);
    config.validate();
    um.estimates.validate(config);
    const int nr = config.n_relays;
    const int ni = config.n_interferers;
    ConicProblem p;
    p.layout.n_relays = nr;
    p.layout.n_interferers = ni;
    p.layout.w_offset = 0;
    p.layout.omega_offset = 2 * nr;
    p.layout.rho_offset = 2 * nr + p.layout.omega_var_count();
    p.layout.varrho_offset = p.layout.rho_offset + 4;
    p.n_vars = p.layout.varrho_offset + 4 * ni;
    set_trace_cost(p);

    add_phase_normalization(p, dq_hat.k_p1p2);

    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + ni + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.p_primary[1 - i] / gamma) *
                         re_inner_row(dq_hat.k_p1p2, p.n_vars, p.layout.w_offset);
        for (int l = 0; l < ni; ++l)
            put_pi_row(soc.map, 1 + l, p.layout, true, i, l, config.p_interferer[l],
                       um.eps_interferer[l], ni);
        put_lifted_matrix(soc.map, 1 + ni, hermitian_sqrt(dq_hat.t_p[i]),
                          p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(rc.kappa_p[i] + config.noise_var);
        soc.label = "primary_worst_case_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    const Eigen::RowVectorXd omega_num = omega_quad_row(dq_hat.k_s1s2, p.n_vars, p.layout);
    {
        LinearRow nonneg;
        nonneg.a = -omega_num;
        nonneg.sense = Sense::le;
        nonneg.rhs = 0.0;
        nonneg.label = "secondary_numerator_nonneg";
        p.linear.push_back(std::move(nonneg));
    }
    for (int i = 0; i < 2; ++i) {
        const double factor = config.mu * config.p_secondary[1 - i] / gamma;
        const double shift = rc.kappa_s[i] + config.noise_var;
        SocBlock soc;
        const int dim = 2 + ni + 2 * nr;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = factor * omega_num;
        soc.offset(0) = 1.0 - shift;
        soc.map.row(1) = -factor * omega_num;
        soc.offset(1) = 1.0 + shift;
        for (int l = 0; l < ni; ++l) {
            put_pi_row(soc.map, 2 + l, p.layout, false, i, l, config.p_interferer[l],
                       um.eps_interferer[l], ni);
            soc.map.row(2 + l) *= 2.0;
        }
        put_lifted_matrix(soc.map, 2 + ni, 2.0 * hermitian_sqrt(dq_hat.t_s[i]),
                          p.layout.w_offset);
        soc.label = "secondary_worst_case_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    add_relay_caps(p, rc.kappa_r, config);
    for (int i = 0; i < 2; ++i) {
        add_aux_norm_bounds(p, true, i, um.estimates.f_p[i], um.estimates.h_i,
                            "p" + std::to_string(i + 1));
        add_aux_norm_bounds(p, false, i, um.estimates.f_s[i], um.estimates.h_i,
                            "s" + std::to_string(i + 1));
    }
    add_schur_coupling(p);
    return p;
}

ConicProblem build_phase_restricted_perfect(const DerivedQuantities& dq,
                                            const NetworkConfig& config, double gamma,
                                            double phase) {
    check_gamma(gamma);
    config.validate();
    const int nr = config.n_relays;
    ConicProblem p;
    p.layout.n_relays = nr;
    p.layout.n_interferers = config.n_interferers;
    p.layout.w_offset = 0;
    p.n_vars = 2 * nr;
    p.cost = Vec::Zero(p.n_vars);

    add_phase_normalization(p, dq.k_p1p2);

    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.p_primary[1 - i] / gamma) *
                         re_inner_row(dq.k_p1p2, p.n_vars, p.layout.w_offset);
        put_lifted_matrix(soc.map, 1, hermitian_sqrt(dq.q_p[i]), p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(dq.zeta_p[i] + config.noise_var);
        soc.label = "primary_sinr_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    const CVec k_rot = std::polar(1.0, phase) * dq.k_s1s2;
    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.mu * config.p_secondary[1 - i] / gamma) *
                         re_inner_row(k_rot, p.n_vars, p.layout.w_offset);
        put_lifted_matrix(soc.map, 1, hermitian_sqrt(dq.q_s[i]), p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(dq.zeta_s[i] + config.noise_var);
        soc.label = "secondary_phase_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    add_relay_caps(p, dq.xi_r, config);
    return p;
}

ConicProblem build_phase_restricted_robust(const DerivedQuantities& dq_hat,
                                           const NetworkConfig& config,
                                           const RobustConstants& rc,
                                           const UncertaintyModel& um, double gamma,
                                           double phase) {
    check_gamma(gamma);
    config.validate();
    um.estimates.validate(config);
    const int nr = config.n_relays;
    const int ni = config.n_interferers;
    ConicProblem p;
    p.layout.n_relays = nr;
    p.layout.n_interferers = ni;
    p.layout.w_offset = 0;
    p.layout.rho_offset = 2 * nr;
    p.layout.varrho_offset = p.layout.rho_offset + 4;
    p.n_vars = p.layout.varrho_offset + 4 * ni;
    p.cost = Vec::Zero(p.n_vars);

    add_phase_normalization(p, dq_hat.k_p1p2);

    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + ni + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.p_primary[1 - i] / gamma) *
                         re_inner_row(dq_hat.k_p1p2, p.n_vars, p.layout.w_offset);
        for (int l = 0; l < ni; ++l)
            put_pi_row(soc.map, 1 + l, p.layout, true, i, l, config.p_interferer[l],
                       um.eps_interferer[l], ni);
        put_lifted_matrix(soc.map, 1 + ni, hermitian_sqrt(dq_hat.t_p[i]),
                          p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(rc.kappa_p[i] + config.noise_var);
        soc.label = "primary_worst_case_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    const CVec k_rot = std::polar(1.0, phase) * dq_hat.k_s1s2;
    for (int i = 0; i < 2; ++i) {
        SocBlock soc;
        const int dim = 1 + ni + 2 * nr + 1;
        soc.map = Mat::Zero(dim, p.n_vars);
        soc.offset = Vec::Zero(dim);
        soc.map.row(0) = std::sqrt(config.mu * config.p_secondary[1 - i] / gamma) *
                         re_inner_row(k_rot, p.n_vars, p.layout.w_offset);
        for (int l = 0; l < ni; ++l)
            put_pi_row(soc.map, 1 + l, p.layout, false, i, l, config.p_interferer[l],
                       um.eps_interferer[l], ni);
        put_lifted_matrix(soc.map, 1 + ni, hermitian_sqrt(dq_hat.t_s[i]),
                          p.layout.w_offset);
        soc.offset(dim - 1) = std::sqrt(rc.kappa_s[i] + config.noise_var);
        soc.label = "secondary_worst_case_phase_cone[" + std::to_string(i + 1) + "]";
        p.socs.push_back(std::move(soc));
    }

    add_relay_caps(p, rc.kappa_r, config);
    for (int i = 0; i < 2; ++i) {
        add_aux_norm_bounds(p, true, i, um.estimates.f_p[i], um.estimates.h_i,
                            "p" + std::to_string(i + 1));
        add_aux_norm_bounds(p, false, i, um.estimates.f_s[i], um.estimates.h_i,
                            "s" + std::to_string(i + 1));
    }
    return p;
}

}  // namespace relaybf::conic
