/*
 * Interior-point solver for the standard-form conic problem
 *
 *     minimize    c'x
 *     subject to  A x = b
 *                 G x + s = h,   s in K
 *
 * where K is a product of a nonnegative orthant, second-order cones, and
 * semidefinite cones (in scaled svec coordinates). The algorithm is a
 * Mehrotra predictor-corrector on the homogeneous self-dual embedding with
 * Nesterov-Todd scaling, in the spirit of ECOS / CVXOPT's conelp. Search
 * directions come from the reduced KKT system
 *
 *     [ 0  A'  G'   ] [dx]
 *     [ A  0   0    ] [dy]  =  rhs,
 *     [ G  0  -W'W  ] [dz]
 *
 * solved by eliminating dz (Cholesky of G'(W'W)^{-1}G) with iterative
 * refinement. Infeasibility is reported only with a certificate.
 */

#include "relaybf/conic/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <vector>

namespace relaybf::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStepDamping = 0.99;

int svec_len(int d) { return d * (d + 1) / 2; }

// Column-major lower triangle, off-diagonals scaled by sqrt(2) so that
// svec(A)'svec(B) = trace(AB) for symmetric A, B.
void svec_into(const Mat& m, double* out) {
    const int d = static_cast<int>(m.rows());
    int idx = 0;
    for (int j = 0; j < d; ++j) {
        out[idx++] = m(j, j);
        for (int i = j + 1; i < d; ++i) out[idx++] = std::numbers::sqrt2 * m(i, j);
    }
}

Mat smat(const double* v, int d) {
    Mat m(d, d);
    const double inv_rt2 = 1.0 / std::numbers::sqrt2;
    int idx = 0;
    for (int j = 0; j < d; ++j) {
        m(j, j) = v[idx++];
        for (int i = j + 1; i < d; ++i) {
            const double val = v[idx++] * inv_rt2;
            m(i, j) = val;
            m(j, i) = val;
        }
    }
    return m;
}

struct ConeSpec {
    int n_lin = 0;
    std::vector<int> soc_dims;
    std::vector<int> psd_dims;

    int rows() const {
        int r = n_lin;
        for (int q : soc_dims) r += q;
        for (int d : psd_dims) r += svec_len(d);
        return r;
    }
    int degree() const {
        int deg = n_lin + static_cast<int>(soc_dims.size());
        for (int d : psd_dims) deg += d;
        return deg;
    }
};

Vec cone_identity(const ConeSpec& spec) {
    Vec e = Vec::Zero(spec.rows());
    int off = 0;
    e.head(spec.n_lin).setOnes();
    off += spec.n_lin;
    for (int q : spec.soc_dims) {
        e(off) = 1.0;
        off += q;
    }
    for (int d : spec.psd_dims) {
        int idx = off;
        for (int j = 0; j < d; ++j) {
            e(idx) = 1.0;
            idx += d - j;
        }
        off += svec_len(d);
    }
    return e;
}

// Smallest margin to the cone boundary; positive means strictly interior.
double cone_margin(const Vec& u, const ConeSpec& spec) {
    double margin = kInf;
    int off = 0;
    if (spec.n_lin > 0) {
        margin = std::min(margin, u.head(spec.n_lin).minCoeff());
        off += spec.n_lin;
    }
    for (int q : spec.soc_dims) {
        margin = std::min(margin, u(off) - u.segment(off + 1, q - 1).norm());
        off += q;
    }
    for (int d : spec.psd_dims) {
        Mat m = smat(u.data() + off, d);
        Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
        margin = std::min(margin, eig.eigenvalues().minCoeff());
        off += svec_len(d);
    }
    return margin;
}

// Largest alpha with u + alpha * du still in the cone (exact boundary step).
double max_step(const Vec& u, const Vec& du, const ConeSpec& spec) {
    double alpha = kInf;
    int off = 0;
    for (int i = 0; i < spec.n_lin; ++i) {
        if (du(i) < 0.0) alpha = std::min(alpha, -u(i) / du(i));
    }
    off += spec.n_lin;
    for (int q : spec.soc_dims) {
        const double u0 = u(off), d0 = du(off);
        const auto u1 = u.segment(off + 1, q - 1);
        const auto d1 = du.segment(off + 1, q - 1);
        const double rho2 = d0 * d0 - d1.squaredNorm();
        const double rho1 = u0 * d0 - u1.dot(d1);
        const double rho0 = u0 * u0 - u1.squaredNorm();
        if (!(d0 >= d1.norm())) {  // otherwise the direction stays in the cone
            double best = kInf;
            const double disc = rho1 * rho1 - rho2 * rho0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double lin_tol = 1e-12 * std::max(1.0, std::abs(u0));
                for (double root : {rho2 != 0.0 ? (-rho1 + sq) / rho2 : kInf,
                                    rho2 != 0.0 ? (-rho1 - sq) / rho2 : kInf,
                                    rho1 != 0.0 ? -rho0 / (2.0 * rho1) : kInf}) {
                    if (root > 0.0 && std::isfinite(root) &&
                        u0 + root * d0 >= -lin_tol)
                        best = std::min(best, root);
                }
            }
            if (d0 < 0.0) best = std::min(best, -u0 / d0);
            alpha = std::min(alpha, best);
        }
        off += q;
    }
    for (int d : spec.psd_dims) {
        Mat su = smat(u.data() + off, d);
        Mat sd = smat(du.data() + off, d);
        Eigen::LLT<Mat> llt(su);
        if (llt.info() != Eigen::Success) {
            // boundary roundoff; nudge and retry
            su += 1e-14 * std::max(1.0, su.diagonal().maxCoeff()) * Mat::Identity(d, d);
            llt.compute(su);
            if (llt.info() != Eigen::Success) {
                alpha = 0.0;
                off += svec_len(d);
                continue;
            }
        }
        Mat l = llt.matrixL();
        Mat m = l.triangularView<Eigen::Lower>().solve(sd);
        m = l.triangularView<Eigen::Lower>().solve(m.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (m + m.transpose()),
                                               Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues().minCoeff();
        if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
        off += svec_len(d);
    }
    return alpha;
}

/// Nesterov-Todd scaling of the cone product, with the scaled point lambda
/// satisfying W z = W^{-T} s = lambda.
struct Scaling {
    struct SocScale {
        double beta = 1.0;
        Vec v;  // unit-hyperbolic-norm scaling point
    };
    struct PsdScale {
        Mat r, rti;  // W u = svec(r' U r); rti = r^{-T}
    };

    Vec lp_w2;  // s ./ z
    std::vector<SocScale> socs;
    std::vector<PsdScale> psds;
    Vec lambda;

    static Scaling identity(const ConeSpec& spec) {
        Scaling w;
        w.lp_w2 = Vec::Ones(spec.n_lin);
        for (int q : spec.soc_dims) {
            SocScale sc;
            sc.v = Vec::Zero(q);
            sc.v(0) = 1.0;
            w.socs.push_back(std::move(sc));
        }
        for (int d : spec.psd_dims)
            w.psds.push_back({Mat::Identity(d, d), Mat::Identity(d, d)});
        w.lambda = Vec::Zero(spec.rows());
        return w;
    }

    bool compute(const Vec& s, const Vec& z, const ConeSpec& spec) {
        const int m = spec.rows();
        lambda.resize(m);
        int off = 0;
        lp_w2 = s.head(spec.n_lin).cwiseQuotient(z.head(spec.n_lin));
        lambda.head(spec.n_lin) =
            s.head(spec.n_lin).cwiseProduct(z.head(spec.n_lin)).cwiseSqrt();
        if (!lp_w2.allFinite()) return false;
        off += spec.n_lin;

        socs.clear();
        for (int q : spec.soc_dims) {
            const auto sb = s.segment(off, q);
            const auto zb = z.segment(off, q);
            const double s_jn2 = sb(0) * sb(0) - sb.tail(q - 1).squaredNorm();
            const double z_jn2 = zb(0) * zb(0) - zb.tail(q - 1).squaredNorm();
            if (s_jn2 <= 0.0 || z_jn2 <= 0.0) return false;
            const double a = std::sqrt(s_jn2);
            const double b = std::sqrt(z_jn2);
            SocScale sc;
            sc.beta = std::sqrt(a / b);
            const double cc = std::sqrt((1.0 + sb.dot(zb) / (a * b)) / 2.0);
            Vec vpre = sb / a;
            vpre(0) += zb(0) / b;
            vpre.tail(q - 1) -= zb.tail(q - 1) / b;
            vpre /= 2.0 * cc;
            sc.v = vpre;
            sc.v(0) += 1.0;
            sc.v /= std::sqrt(2.0 * sc.v(0));
            // scaled point
            const double dd = 2.0 * cc + sb(0) / a + zb(0) / b;
            auto lb = lambda.segment(off, q);
            lb(0) = cc;
            lb.tail(q - 1) = ((cc + zb(0) / b) / dd / a) * sb.tail(q - 1) +
                             ((cc + sb(0) / a) / dd / b) * zb.tail(q - 1);
            lb *= std::sqrt(a * b);
            socs.push_back(std::move(sc));
            off += q;
        }

        psds.clear();
        for (int d : spec.psd_dims) {
            Mat sm = smat(s.data() + off, d);
            Mat zm = smat(z.data() + off, d);
            Eigen::LLT<Mat> ls_f(sm), lz_f(zm);
            if (ls_f.info() != Eigen::Success || lz_f.info() != Eigen::Success)
                return false;
            Mat ls = ls_f.matrixL();
            Mat lz = lz_f.matrixL();
            Eigen::JacobiSVD<Mat> svd(lz.transpose() * ls,
                                      Eigen::ComputeFullU | Eigen::ComputeFullV);
            Vec sv = svd.singularValues();
            if (sv.minCoeff() <= 0.0) return false;
            PsdScale ps;
            ps.r = lz.transpose().triangularView<Eigen::Upper>().solve(svd.matrixU());
            ps.rti = lz * svd.matrixU();
            for (int i = 0; i < d; ++i) {
                const double root = std::sqrt(sv(i));
                ps.r.col(i) *= root;
                ps.rti.col(i) /= root;
            }
            Mat lam = Mat::Zero(d, d);
            lam.diagonal() = sv;
            svec_into(lam, lambda.data() + off);
            psds.push_back(std::move(ps));
            off += svec_len(d);
        }
        return lambda.allFinite();
    }

    // out = op(u) per cone; ops share the traversal scaffold
    enum class Op { w, wt, w2, w2inv };

    Vec apply(const Vec& u, const ConeSpec& spec, Op op) const {
        Vec out(u.size());
        int off = 0;
        switch (op) {
            case Op::w:
            case Op::wt:
                out.head(spec.n_lin) =
                    u.head(spec.n_lin).cwiseProduct(lp_w2.cwiseSqrt());
                break;
            case Op::w2:
                out.head(spec.n_lin) = u.head(spec.n_lin).cwiseProduct(lp_w2);
                break;
            case Op::w2inv:
                out.head(spec.n_lin) = u.head(spec.n_lin).cwiseQuotient(lp_w2);
                break;
        }
        off += spec.n_lin;
        for (std::size_t k = 0; k < socs.size(); ++k) {
            const int q = spec.soc_dims[k];
            const auto& sc = socs[k];
            Vec ub = u.segment(off, q);
            auto householder = [&](const Vec& vv, const Vec& x) {
                Vec y = x;  // -Jx, then the rank-one part
                y(0) = -x(0);
                y += 2.0 * vv * vv.dot(x);  // (2vv' - J) x
                return y;
            };
            Vec jv = -sc.v;
            jv(0) = sc.v(0);
            switch (op) {
                case Op::w:
                case Op::wt:
                    out.segment(off, q) = sc.beta * householder(sc.v, ub);
                    break;
                case Op::w2:
                    out.segment(off, q) =
                        sc.beta * sc.beta * householder(sc.v, householder(sc.v, ub));
                    break;
                case Op::w2inv:
                    out.segment(off, q) = householder(jv, householder(jv, ub)) /
                                          (sc.beta * sc.beta);
                    break;
            }
            off += q;
        }
        for (std::size_t k = 0; k < psds.size(); ++k) {
            const int d = spec.psd_dims[k];
            const auto& ps = psds[k];
            Mat um = smat(u.data() + off, d);
            Mat res;
            switch (op) {
                case Op::w: res = ps.r.transpose() * um * ps.r; break;
                case Op::wt: res = ps.r * um * ps.r.transpose(); break;
                case Op::w2: {
                    Mat p = ps.r * ps.r.transpose();
                    res = p * um * p;
                    break;
                }
                case Op::w2inv: {
                    Mat pinv = ps.rti * ps.rti.transpose();
                    res = pinv * um * pinv;
                    break;
                }
            }
            res = 0.5 * (res + res.transpose()).eval();
            svec_into(res, out.data() + off);
            off += svec_len(d);
        }
        return out;
    }
};

// Jordan product u o v of the cone algebra.
Vec jordan_product(const Vec& u, const Vec& v, const ConeSpec& spec) {
    Vec out(u.size());
    int off = 0;
    out.head(spec.n_lin) = u.head(spec.n_lin).cwiseProduct(v.head(spec.n_lin));
    off += spec.n_lin;
    for (int q : spec.soc_dims) {
        const auto ub = u.segment(off, q);
        const auto vb = v.segment(off, q);
        out(off) = ub.dot(vb);
        out.segment(off + 1, q - 1) =
            ub(0) * vb.tail(q - 1) + vb(0) * ub.tail(q - 1);
        off += q;
    }
    for (int d : spec.psd_dims) {
        Mat um = smat(u.data() + off, d);
        Mat vm = smat(v.data() + off, d);
        Mat res = 0.5 * (um * vm + vm * um);
        svec_into(res, out.data() + off);
        off += svec_len(d);
    }
    return out;
}

// Solves lambda o u = d. The psd part of lambda is diagonal by construction.
Vec jordan_solve(const Vec& lambda, const Vec& d, const ConeSpec& spec) {
    Vec out(d.size());
    int off = 0;
    out.head(spec.n_lin) = d.head(spec.n_lin).cwiseQuotient(lambda.head(spec.n_lin));
    off += spec.n_lin;
    for (int q : spec.soc_dims) {
        const auto lb = lambda.segment(off, q);
        const auto db = d.segment(off, q);
        const double det = lb(0) * lb(0) - lb.tail(q - 1).squaredNorm();
        const double u0 = (lb(0) * db(0) - lb.tail(q - 1).dot(db.tail(q - 1))) / det;
        out(off) = u0;
        out.segment(off + 1, q - 1) = (db.tail(q - 1) - u0 * lb.tail(q - 1)) / lb(0);
        off += q;
    }
    for (int dd : spec.psd_dims) {
        // recover the diagonal of lambda from its svec layout
        Vec diag(dd);
        int idx = off;
        for (int j = 0; j < dd; ++j) {
            diag(j) = lambda(idx);
            idx += dd - j;
        }
        Mat dm = smat(d.data() + off, dd);
        Mat res(dd, dd);
        for (int j = 0; j < dd; ++j)
            for (int i = 0; i < dd; ++i)
                res(i, j) = 2.0 * dm(i, j) / (diag(i) + diag(j));
        svec_into(res, out.data() + off);
        off += svec_len(dd);
    }
    return out;
}

/// Reduced KKT factorization for one scaling; shared by all solves of the
/// iteration.
class KktSolver {
  public:
    bool factor(const Mat& g, const Mat& a, const Scaling& w, const ConeSpec& spec) {
        g_ = &g;
        a_ = &a;
        w_ = &w;
        spec_ = &spec;
        const int n = static_cast<int>(g.cols());
        scaled_g_.resize(g.rows(), n);
        for (int j = 0; j < n; ++j)
            scaled_g_.col(j) = w.apply(g.col(j), spec, Scaling::Op::w2inv);
        Mat h = g.transpose() * scaled_g_;
        h = 0.5 * (h + h.transpose()).eval();
        const double reg = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 4; ++attempt) {
            Mat hr = h + reg * std::pow(100.0, attempt) * Mat::Identity(n, n);
            h_llt_.compute(hr);
            if (h_llt_.info() == Eigen::Success) break;
        }
        if (h_llt_.info() != Eigen::Success) return false;
        if (a.rows() > 0) {
            Mat hint = h_llt_.solve(a.transpose());
            Mat s = a * hint;
            s = 0.5 * (s + s.transpose()).eval();
            s.diagonal().array() += 1e-12 * std::max(1.0, s.diagonal().cwiseAbs().maxCoeff());
            s_llt_.compute(s);
            if (s_llt_.info() != Eigen::Success) return false;
        }
        return true;
    }

    void solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& dx, Vec& dy, Vec& dz,
               int refine_rounds) const {
        solve_once(bx, by, bz, dx, dy, dz);
        for (int round = 0; round < refine_rounds; ++round) {
            Vec rx = bx - ((a_->rows() ? Vec(a_->transpose() * dy) : Vec::Zero(dx.size())) +
                           g_->transpose() * dz);
            Vec ry = a_->rows() ? Vec(by - (*a_) * dx) : Vec();
            Vec rz = bz - ((*g_) * dx - w_->apply(dz, *spec_, Scaling::Op::w2));
            Vec ex, ey, ez;
            solve_once(rx, ry, rz, ex, ey, ez);
            dx += ex;
            if (dy.size()) dy += ey;
            dz += ez;
        }
    }

  private:
    void solve_once(const Vec& bx, const Vec& by, const Vec& bz, Vec& dx, Vec& dy,
                    Vec& dz) const {
        Vec v1 = bx + scaled_g_.transpose() * bz;
        if (a_->rows() > 0) {
            Vec hv = h_llt_.solve(v1);
            dy = s_llt_.solve((*a_) * hv - by);
            dx = h_llt_.solve(v1 - a_->transpose() * dy);
        } else {
            dy = Vec();
            dx = h_llt_.solve(v1);
        }
        dz = w_->apply((*g_) * dx - bz, *spec_, Scaling::Op::w2inv);
    }

    const Mat* g_ = nullptr;
    const Mat* a_ = nullptr;
    const Scaling* w_ = nullptr;
    const ConeSpec* spec_ = nullptr;
    Mat scaled_g_;
    Eigen::LLT<Mat> h_llt_;
    Eigen::LLT<Mat> s_llt_;
};

struct HsdeResult {
    SolverResult::Status status = SolverResult::Status::error;
    Vec x;
    int iterations = 0;
};

HsdeResult run_hsde(const Mat& g, const Vec& h, const Mat& a, const Vec& b, const Vec& c,
                    const ConeSpec& spec, const SolverSettings& settings) {
    const int n = static_cast<int>(g.cols());
    const int p = static_cast<int>(a.rows());
    const int m = static_cast<int>(g.rows());
    const double deg = spec.degree() + 1;
    const Vec e = cone_identity(spec);

    HsdeResult out;
    Vec x = Vec::Zero(n), y = Vec::Zero(p), s(m), z(m);
    double tau = 1.0, kappa = 1.0;

    // Initial point from one identity-scaled KKT solve, shifted into the cone.
    {
        Scaling wi = Scaling::identity(spec);
        KktSolver kkt;
        if (!kkt.factor(g, a, wi, spec)) return out;
        Vec dx, dy, dz;
        kkt.solve(Vec::Zero(n), b, h, dx, dy, dz, settings.refine_rounds);
        x = dx;
        s = -dz;
        const double ms = cone_margin(s, spec);
        if (ms <= 1e-8 * std::max(1.0, s.norm())) s += (1.0 - ms) * e;
        kkt.solve(-c, Vec::Zero(p), Vec::Zero(m), dx, dy, dz, settings.refine_rounds);
        y = dy;
        z = dz;
        const double mz = cone_margin(z, spec);
        if (mz <= 1e-8 * std::max(1.0, z.norm())) z += (1.0 - mz) * e;
    }
    if (std::getenv("RELAYBF_SOLVER_TRACE"))
        std::fprintf(stderr, "init |x| %.3e |s| %.3e |z| %.3e margins s %.3e z %.3e\n",
                     x.norm(), s.norm(), z.norm(), cone_margin(s, spec),
                     cone_margin(z, spec));

    const double resx0 = std::max(1.0, c.norm());
    const double resy0 = std::max(1.0, b.norm());
    const double resz0 = std::max(1.0, h.norm());
    const double tol = settings.tol;
    const bool trace = std::getenv("RELAYBF_SOLVER_TRACE") != nullptr;

    Scaling w;
    KktSolver kkt;
    int consecutive_small_steps = 0;

    for (int iter = 0; iter <= settings.max_iters; ++iter) {
        out.iterations = iter;
        const Vec rx = (p ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z +
                       c * tau;
        const Vec ry = p ? Vec(a * x - b * tau) : Vec();
        const Vec rz = g * x + s - h * tau;
        const double rtau = c.dot(x) + (p ? b.dot(y) : 0.0) + h.dot(z) + kappa;

        const double pres =
            std::max(p ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
        const double dres = rx.norm() / resx0 / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double pcost = c.dot(x) / tau;
        const double dcost = -((p ? b.dot(y) : 0.0) + h.dot(z)) / tau;
        const double gap_scale = std::max({1.0, std::abs(pcost), std::abs(dcost)});

        if (trace)
            std::fprintf(stderr,
                         "iter %3d pres %9.2e dres %9.2e gap %9.2e tau %9.2e kappa "
                         "%9.2e pcost %9.2e\n",
                         iter, pres, dres, gap, tau, kappa, pcost);
        if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(gap)) {
            out.status = SolverResult::Status::error;
            return out;
        }

        if (pres <= tol && dres <= tol && gap <= tol * gap_scale) {
            out.status = SolverResult::Status::feasible;
            out.x = x / tau;
            return out;
        }
        const double by_hz = -((p ? b.dot(y) : 0.0) + h.dot(z));
        if (by_hz > 0.0) {
            const double pinfres =
                ((p ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z).norm() /
                resx0 / by_hz;
            if (pinfres <= tol) {
                out.status = SolverResult::Status::infeasible;
                return out;
            }
        }
        if (-c.dot(x) > 0.0) {
            const double dinfres =
                std::max(p ? (a * x).norm() / resy0 : 0.0, (g * x + s).norm() / resz0) /
                (-c.dot(x));
            if (dinfres <= tol) {
                out.status = SolverResult::Status::error;  // unbounded; not produced here
                return out;
            }
        }
        if (iter == settings.max_iters) break;

        if (!w.compute(s, z, spec) || !kkt.factor(g, a, w, spec)) {
            out.status = SolverResult::Status::inaccurate;
            out.x = x / tau;
            return out;
        }
        const double mu = (s.dot(z) + tau * kappa) / deg;

        Vec x1, y1, z1;
        kkt.solve(-c, b, h, x1, y1, z1, settings.refine_rounds);
        const double dot1 =
            c.dot(x1) + (p ? b.dot(y1) : 0.0) + h.dot(z1) - kappa / tau;
        if (std::abs(dot1) < 1e-300) {
            out.status = SolverResult::Status::inaccurate;
            out.x = x / tau;
            return out;
        }

        auto direction = [&](double res_scale, const Vec& bs, double dtau_target,
                             Vec& dx, Vec& dy, Vec& dz, Vec& ds, double& dtau,
                             double& dkappa) {
            Vec bz = -res_scale * rz - w.apply(bs, spec, Scaling::Op::wt);
            Vec x2, y2, z2;
            kkt.solve(-res_scale * rx, p ? Vec(-res_scale * ry) : Vec(), bz, x2, y2, z2,
                      settings.refine_rounds);
            const double dot2 = c.dot(x2) + (p ? b.dot(y2) : 0.0) + h.dot(z2);
            dtau = (-res_scale * rtau + dtau_target / tau - dot2) / dot1;
            dx = x2 + dtau * x1;
            if (p) dy = y2 + dtau * y1;
            dz = z2 + dtau * z1;
            ds = w.apply(bs - w.apply(dz, spec, Scaling::Op::w), spec, Scaling::Op::wt);
            dkappa = -(dtau_target + kappa * dtau) / tau;
        };

        // predictor
        Vec dxa, dya, dza, dsa;
        double dtaua, dkappaa;
        direction(1.0, -w.lambda, tau * kappa, dxa, dya, dza, dsa, dtaua, dkappaa);

        if (trace) {
            const double n1 = ((p ? Vec(a.transpose() * dya) : Vec::Zero(n)) +
                               g.transpose() * dza + c * dtaua + rx)
                                  .norm();
            const double n2 = p ? (a * dxa - b * dtaua + ry).norm() : 0.0;
            const double n3 = (g * dxa + dsa - h * dtaua + rz).norm();
            const double n4 = std::abs(c.dot(dxa) + (p ? b.dot(dya) : 0.0) +
                                       h.dot(dza) + dkappaa + rtau);
            const Vec comp = jordan_product(
                w.lambda,
                w.apply(dza, spec, Scaling::Op::w) +
                    w.apply(dsa, spec, Scaling::Op::w2inv).cwiseProduct(Vec::Ones(m)),
                spec);
            std::fprintf(stderr,
                         "  newton aff: n1 %.1e n2 %.1e n3 %.1e n4 %.1e astep %.3f\n",
                         n1, n2, n3, n4,
                         std::min(max_step(s, dsa, spec), max_step(z, dza, spec)));
            (void)comp;
        }

        double alpha = std::min(max_step(s, dsa, spec), max_step(z, dza, spec));
        if (dtaua < 0.0) alpha = std::min(alpha, -tau / dtaua);
        if (dkappaa < 0.0) alpha = std::min(alpha, -kappa / dkappaa);
        alpha = std::min(alpha, 1.0);
        const double sigma = std::pow(1.0 - alpha, 3);

        // corrector; W^{-T} ds_aff = -(lambda + W dz_aff)
        Vec wdz = w.apply(dza, spec, Scaling::Op::w);
        Vec corr = -jordan_product(w.lambda + wdz, wdz, spec);
        Vec d_comb = jordan_product(w.lambda, w.lambda, spec) + corr - sigma * mu * e;
        Vec bs = -jordan_solve(w.lambda, d_comb, spec);
        const double dtau_target = tau * kappa + dtaua * dkappaa - sigma * mu;

        Vec dx, dy, dz, ds;
        double dtau, dkappa;
        direction(1.0 - sigma, bs, dtau_target, dx, dy, dz, ds, dtau, dkappa);

        double amax = std::min(max_step(s, ds, spec), max_step(z, dz, spec));
        if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
        if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
        const double step = std::min(1.0, kStepDamping * amax);
        if (step < 1e-10) {
            if (++consecutive_small_steps >= 3) break;
        } else {
            consecutive_small_steps = 0;
        }

        x += step * dx;
        if (p) y += step * dy;
        z += step * dz;
        s += step * ds;
        tau += step * dtau;
        kappa += step * dkappa;
        if (tau <= 0.0 || kappa < 0.0 || !std::isfinite(tau)) {
            out.status = SolverResult::Status::error;
            return out;
        }
    }

    // Ran out of iterations or stalled: classify from the last residuals.
    {
        const Vec rx = (p ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z +
                       c * tau;
        const Vec ry = p ? Vec(a * x - b * tau) : Vec();
        const Vec rz = g * x + s - h * tau;
        const double pres =
            std::max(p ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
        const double dres = rx.norm() / resx0 / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double by_hz = -((p ? b.dot(y) : 0.0) + h.dot(z));
        if (by_hz > 0.0) {
            const double pinfres =
                ((p ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z).norm() /
                resx0 / by_hz;
            if (pinfres <= 1e3 * settings.tol) {
                out.status = SolverResult::Status::infeasible;
                return out;
            }
        }
        if (pres <= 1e4 * settings.tol && dres <= 1e4 * settings.tol &&
            gap <= std::sqrt(settings.tol)) {
            out.status = SolverResult::Status::inaccurate;
            out.x = x / tau;
            return out;
        }
    }
    out.status = SolverResult::Status::error;
    return out;
}

struct Assembled {
    Mat g;
    Vec h;
    Mat a;
    Vec b;
    Vec c;
    ConeSpec spec;
    Vec col_scale;
    bool trivially_infeasible = false;
};

Assembled assemble(const ConicProblem& p) {
    Assembled out;
    const int n = p.n_vars;
    std::vector<const LinearRow*> eqs, ineqs;
    for (const auto& row : p.linear) {
        if (row.a.cwiseAbs().maxCoeff() == 0.0) {
            const bool bad = (row.sense == Sense::eq) ? std::abs(row.rhs) > 0.0
                                                      : row.rhs < 0.0;
            if (bad) out.trivially_infeasible = true;
            continue;
        }
        (row.sense == Sense::eq ? eqs : ineqs).push_back(&row);
    }

    out.spec.n_lin = static_cast<int>(ineqs.size());
    for (const auto& soc : p.socs)
        out.spec.soc_dims.push_back(static_cast<int>(soc.map.rows()));
    for (const auto& psd : p.psds) out.spec.psd_dims.push_back(psd.dim);

    const int m = out.spec.rows();
    out.g = Mat::Zero(m, n);
    out.h = Vec::Zero(m);
    int off = 0;
    for (const auto* row : ineqs) {  // a'x <= rhs  ->  s = rhs - a'x >= 0
        out.g.row(off) = row->a;
        out.h(off) = row->rhs;
        ++off;
    }
    for (const auto& soc : p.socs) {  // map*x + offset in cone -> G = -map
        const int q = static_cast<int>(soc.map.rows());
        out.g.middleRows(off, q) = -soc.map;
        out.h.segment(off, q) = soc.offset;
        off += q;
    }
    for (const auto& psd : p.psds) {
        const int len = svec_len(psd.dim);
        Vec tmp(len);
        svec_into(psd.constant_matrix(), tmp.data());
        out.h.segment(off, len) = tmp;
        for (const auto& [var, entries] : psd.coeff) {
            (void)entries;
            svec_into(psd.coeff_matrix(var), tmp.data());
            out.g.col(var).segment(off, len) = -tmp;
        }
        off += len;
    }

    out.a = Mat::Zero(static_cast<int>(eqs.size()), n);
    out.b = Vec::Zero(static_cast<int>(eqs.size()));
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        out.a.row(static_cast<int>(i)) = eqs[i]->a;
        out.b(static_cast<int>(i)) = eqs[i]->rhs;
    }
    out.c = p.cost.size() ? p.cost : Vec::Zero(n);
    out.col_scale = Vec::Ones(n);
    return out;
}

// Block-uniform Ruiz equilibration: rows of one cone block share a scale so
// the cone geometry is preserved; columns are plain variable substitutions.
void equilibrate(Assembled& prob) {
    const int n = static_cast<int>(prob.g.cols());
    const int p = static_cast<int>(prob.a.rows());
    std::vector<std::pair<int, int>> groups;  // row ranges of G sharing a scale
    {
        int off = 0;
        for (int i = 0; i < prob.spec.n_lin; ++i) groups.emplace_back(off++, 1);
        for (int q : prob.spec.soc_dims) {
            groups.emplace_back(off, q);
            off += q;
        }
        for (int d : prob.spec.psd_dims) {
            groups.emplace_back(off, svec_len(d));
            off += svec_len(d);
        }
    }
    for (int pass = 0; pass < 3; ++pass) {
        for (auto [start, len] : groups) {
            const double mg = std::max(prob.g.middleRows(start, len).cwiseAbs().maxCoeff(),
                                       prob.h.segment(start, len).cwiseAbs().maxCoeff());
            if (mg > 0.0) {
                const double sc = 1.0 / std::sqrt(mg);
                prob.g.middleRows(start, len) *= sc;
                prob.h.segment(start, len) *= sc;
            }
        }
        for (int i = 0; i < p; ++i) {
            const double mg =
                std::max(prob.a.row(i).cwiseAbs().maxCoeff(), std::abs(prob.b(i)));
            if (mg > 0.0) {
                const double sc = 1.0 / std::sqrt(mg);
                prob.a.row(i) *= sc;
                prob.b(i) *= sc;
            }
        }
        for (int j = 0; j < n; ++j) {
            double mc = prob.g.col(j).cwiseAbs().maxCoeff();
            if (p) mc = std::max(mc, prob.a.col(j).cwiseAbs().maxCoeff());
            if (mc > 0.0) {
                const double sc = 1.0 / std::sqrt(mc);
                prob.g.col(j) *= sc;
                if (p) prob.a.col(j) *= sc;
                prob.c(j) *= sc;
                prob.col_scale(j) *= sc;
            }
        }
    }
}

}  // namespace

SolverResult solve_feasibility(const ConicProblem& p, double tol) {
    SolverSettings settings;
    settings.tol = tol;
    return solve_feasibility(p, settings);
}

SolverResult solve_feasibility(const ConicProblem& p, const SolverSettings& settings) {
    const auto start = std::chrono::steady_clock::now();
    SolverResult result;
    Assembled prob = assemble(p);
    if (prob.trivially_infeasible) {
        result.status = SolverResult::Status::infeasible;
        result.solve_time = std::chrono::steady_clock::now() - start;
        return result;
    }
    equilibrate(prob);
    HsdeResult hsde = run_hsde(prob.g, prob.h, prob.a, prob.b, prob.c, prob.spec, settings);
    result.iterations = hsde.iterations;
    switch (hsde.status) {
        case SolverResult::Status::feasible:
        case SolverResult::Status::inaccurate: {
            result.x = prob.col_scale.cwiseProduct(hsde.x);
            result.residuals = p.max_violation(result.x);
            const bool clean = result.residuals <= 50.0 * settings.tol;
            result.status = (hsde.status == SolverResult::Status::feasible && clean)
                                ? SolverResult::Status::feasible
                                : SolverResult::Status::inaccurate;
            result.w_lift = result.x.segment(p.layout.w_offset, 2 * p.layout.n_relays);
            if (p.layout.has_omega()) {
                CMat omega = p.layout.unpack_omega(result.x);
                result.omega_lift.resize(2 * p.layout.n_relays, 2 * p.layout.n_relays);
                const int nr = p.layout.n_relays;
                result.omega_lift.topLeftCorner(nr, nr) = omega.real();
                result.omega_lift.topRightCorner(nr, nr) = -omega.imag();
                result.omega_lift.bottomLeftCorner(nr, nr) = omega.imag();
                result.omega_lift.bottomRightCorner(nr, nr) = omega.real();
            }
            break;
        }
        case SolverResult::Status::infeasible:
            result.status = SolverResult::Status::infeasible;
            break;
        default:
            result.status = hsde.status;
            break;
    }
    result.solve_time = std::chrono::steady_clock::now() - start;
    return result;
}

}  // namespace relaybf::conic
