#include "relaybf/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "relaybf/conic/builder.hpp"
#include "relaybf/conic/solver.hpp"
#include "relaybf/feasibility.hpp"
#include "relaybf/lift.hpp"
#include "relaybf/metrics.hpp"
#include "relaybf/model.hpp"
#include "relaybf/rng.hpp"

namespace relaybf {

namespace {

constexpr double kSinrSlack = 1e-6;    // relative slack on verified SINR levels
constexpr double kPowerSlack = 1e-8;   // relative slack on relay caps
constexpr int kPhaseGrid = 16;
constexpr int kVerifySamples = 200;
constexpr std::uint64_t kVerifySeed = 0x706f7374ULL;

bool caps_ok(const CVec& w, const Vec& scale, const NetworkConfig& config) {
    for (int j = 0; j < config.n_relays; ++j) {
        if (scale(j) * std::norm(w(j)) > config.p_relay_max[j] * (1.0 + kPowerSlack))
            return false;
    }
    return true;
}

}  // namespace

int bisection_iterations_needed(double gamma_up, double tol_gamma) {
    if (!(gamma_up > 0.0) || !(tol_gamma > 0.0) || gamma_up <= tol_gamma) return 0;
    return static_cast<int>(std::ceil(std::log2(gamma_up / tol_gamma)));
}

ExtractedBeamformer extract_beamformer(const conic::SolverResult& res, const CVec& k_p1p2) {
    ExtractedBeamformer out;
    out.w = unlift_complex(res.w_lift);
    const Complex z = k_p1p2.dot(out.w);
    if (std::abs(z) > 0.0) out.w *= std::conj(z) / std::abs(z);
    out.rank_one_ok = true;
    if (res.omega_lift.size() > 0) {
        CMat omega = unlift_hermitian(res.omega_lift);
        Eigen::SelfAdjointEigenSolver<CMat> eig(omega, Eigen::EigenvaluesOnly);
        const Vec vals = eig.eigenvalues();
        const int n = static_cast<int>(vals.size());
        const double top = vals(n - 1);
        if (top > 1e-300 && n > 1) out.rank_one_ok = vals(n - 2) / top <= 1e-6;
    }
    return out;
}

bool post_verify_perfect(const CVec& w, const DerivedQuantities& dq,
                         const NetworkConfig& config, double gamma) {
    if (!caps_ok(w, dq.xi_r, config)) return false;
    if (gamma <= 0.0) return true;
    return objective(w, dq, config) >= gamma * (1.0 - kSinrSlack);
}

bool post_verify_robust(const CVec& w, const DerivedQuantities& dq_hat,
                        const NetworkConfig& config, const RobustConstants& rc,
                        const UncertaintyModel& um, double gamma) {
    const int ni = config.n_interferers;
    if (!caps_ok(w, rc.kappa_r, config)) return false;
    if (gamma <= 0.0) return true;

    const double level = gamma * (1.0 - kSinrSlack);
    for (int i = 0; i < 2; ++i) {
        for (int side = 0; side < 2; ++side) {
            const bool primary = side == 0;
            const CVec& f = primary ? um.estimates.f_p[i] : um.estimates.f_s[i];
            const CVec& k = primary ? dq_hat.k_p1p2 : dq_hat.k_s1s2;
            const CMat& t = primary ? dq_hat.t_p[i] : dq_hat.t_s[i];
            const double kappa = primary ? rc.kappa_p[i] : rc.kappa_s[i];
            const double p_other =
                primary ? config.p_primary[1 - i] : config.p_secondary[1 - i];
            const double weight = primary ? 1.0 : config.mu;
            const double relayed_norm = f.conjugate().cwiseProduct(w).norm();
            double den = kappa + config.noise_var + (w.adjoint() * t * w).value().real();
            for (int l = 0; l < ni; ++l) {
                const Complex g = w.dot(f.cwiseProduct(um.estimates.h_i[l]));
                const double worst = std::abs(g) + um.eps_interferer[l] * relayed_norm;
                den += config.p_interferer[l] * worst * worst;
            }
            const double num = p_other * std::norm(k.dot(w));
            if (weight * num / den < level) return false;
        }
    }

    for (int k = 0; k < kVerifySamples; ++k) {
        ChannelSet sample = sample_uncertainty(um, derive_seed(kVerifySeed, k));
        DerivedQuantities dq_s = derive(config, sample);
        if (objective(w, dq_s, config) < level) return false;
        if (!caps_ok(w, dq_s.xi_r, config)) return false;
    }
    return true;
}

namespace {

struct ProbeContext {
    const DerivedQuantities& dq;
    const NetworkConfig& config;
    const RobustConstants* rc = nullptr;  // robust mode when set
    const UncertaintyModel* um = nullptr;
    double solver_tol = 1e-8;
};

bool verify(const ProbeContext& ctx, const CVec& w, double gamma) {
    if (ctx.rc)
        return post_verify_robust(w, ctx.dq, ctx.config, *ctx.rc, *ctx.um, gamma);
    return post_verify_perfect(w, ctx.dq, ctx.config, gamma);
}

struct ProbeOutcome {
    bool feasible = false;
    CVec w;
    bool rank_one_ok = false;
};

// Feasibility verdict at one gamma: relaxed solve, direct extraction, then
// phase-restricted re-solves until a point passes the exact re-check. A
// relaxed infeasible certificate settles the verdict immediately since the
// relaxation contains the true feasible set.
ProbeOutcome probe_gamma(const ProbeContext& ctx, double gamma,
                         std::optional<double> phase_hint) {
    using conic::SolverResult;
    ProbeOutcome out;
    conic::ConicProblem relaxed =
        ctx.rc ? conic::build_robust(ctx.dq, ctx.config, *ctx.rc, *ctx.um, gamma)
               : conic::build_perfect(ctx.dq, ctx.config, gamma);
    SolverResult res = conic::solve_feasibility(relaxed, ctx.solver_tol);
    if (res.status == SolverResult::Status::infeasible) return out;

    std::vector<double> phases;
    bool rank_flag = false;
    if (res.status == SolverResult::Status::feasible ||
        res.status == SolverResult::Status::inaccurate) {
        ExtractedBeamformer ext = extract_beamformer(res, ctx.dq.k_p1p2);
        rank_flag = ext.rank_one_ok;
        if (res.status == SolverResult::Status::feasible &&
            verify(ctx, ext.w, gamma)) {
            out.feasible = true;
            out.w = ext.w;
            out.rank_one_ok = ext.rank_one_ok;
            return out;
        }
        const Complex direct = ctx.dq.k_s1s2.dot(ext.w);
        if (std::abs(direct) > 0.0) phases.push_back(std::arg(direct));
        if (res.omega_lift.size() > 0) {
            CMat omega = unlift_hermitian(res.omega_lift);
            Eigen::SelfAdjointEigenSolver<CMat> eig(omega);
            CVec top = eig.eigenvectors().col(omega.rows() - 1);
            const Complex align = ctx.dq.k_p1p2.dot(top);
            if (std::abs(align) > 0.0) top *= std::conj(align) / std::abs(align);
            const Complex via_omega = ctx.dq.k_s1s2.dot(top);
            if (std::abs(via_omega) > 0.0) phases.push_back(std::arg(via_omega));
        }
    }
    if (phase_hint) phases.push_back(*phase_hint);
    for (int k = 0; k < kPhaseGrid; ++k)
        phases.push_back(2.0 * std::numbers::pi * k / kPhaseGrid);

    for (double phase : phases) {
        conic::ConicProblem restricted =
            ctx.rc ? conic::build_phase_restricted_robust(ctx.dq, ctx.config, *ctx.rc,
                                                          *ctx.um, gamma, phase)
                   : conic::build_phase_restricted_perfect(ctx.dq, ctx.config, gamma,
                                                           phase);
        SolverResult r2 = conic::solve_feasibility(restricted, ctx.solver_tol);
        if (r2.status != SolverResult::Status::feasible) continue;
        ExtractedBeamformer ext = extract_beamformer(r2, ctx.dq.k_p1p2);
        if (verify(ctx, ext.w, gamma)) {
            out.feasible = true;
            out.w = ext.w;
            out.rank_one_ok = rank_flag;
            return out;
        }
    }
    return out;
}

BeamformingSolution run_bisection(const ProbeContext& ctx, const BisectionConfig& bc) {
    BeamformingSolution sol;
    const int nr = ctx.config.n_relays;
    sol.w = CVec::Zero(nr);
    sol.relay_power = Vec::Zero(nr);

    const double gamma_up = gamma_upper_bound(ctx.dq, ctx.config);
    if (!(gamma_up > 0.0)) {
        sol.diagnostic = "upper bound is zero; nothing achievable";
        return sol;
    }
    const double tol = bc.tol_gamma > 0.0 ? bc.tol_gamma : 1e-3 * gamma_up;

    double lo = 0.0;
    double hi = gamma_up;
    bool found = false;
    std::optional<double> phase_hint;
    int iters = 0;
    while (hi - lo > tol && iters < bc.max_iters) {
        ++iters;
        const double mid = 0.5 * (lo + hi);
        ProbeOutcome outcome = probe_gamma(ctx, mid, phase_hint);
        if (outcome.feasible) {
            lo = mid;
            sol.w = outcome.w;
            sol.rank_one_ok = outcome.rank_one_ok;
            found = true;
            const Complex z = ctx.dq.k_s1s2.dot(outcome.w);
            if (std::abs(z) > 0.0) phase_hint = std::arg(z);
        } else {
            hi = mid;
        }
    }
    sol.iterations = iters;
    if (!found) {
        sol.diagnostic = "no feasible midpoint found";
        return sol;
    }
    sol.gamma = lo;
    sol.sinr_p = {sinr(sol.w, ctx.dq, User::P1, ctx.config),
                  sinr(sol.w, ctx.dq, User::P2, ctx.config)};
    sol.sinr_s = {sinr(sol.w, ctx.dq, User::S1, ctx.config),
                  sinr(sol.w, ctx.dq, User::S2, ctx.config)};
    sol.relay_power = relay_powers(sol.w, ctx.dq);
    return sol;
}

}  // namespace

BeamformingSolution optimize_perfect(const DerivedQuantities& dq,
                                     const NetworkConfig& config,
                                     const BisectionConfig& bc) {
    ProbeContext ctx{dq, config, nullptr, nullptr, bc.solver_tol};
    return run_bisection(ctx, bc);
}

BeamformingSolution optimize_robust(const DerivedQuantities& dq_hat,
                                    const NetworkConfig& config,
                                    const RobustConstants& rc,
                                    const UncertaintyModel& um,
                                    const BisectionConfig& bc) {
    ProbeContext ctx{dq_hat, config, &rc, &um, bc.solver_tol};
    return run_bisection(ctx, bc);
}

}  // namespace relaybf
