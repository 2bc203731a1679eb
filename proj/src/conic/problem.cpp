#include "relaybf/conic/problem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "relaybf/lift.hpp"

namespace relaybf::conic {

Mat PsdBlock::constant_matrix() const {
    Mat m = Mat::Zero(dim, dim);
    for (const auto& t : constant) m(t.row, t.col) += t.value;
    return m;
}

Mat PsdBlock::coeff_matrix(int var) const {
    Mat m = Mat::Zero(dim, dim);
    auto it = coeff.find(var);
    if (it != coeff.end())
        for (const auto& t : it->second) m(t.row, t.col) += t.value;
    return m;
}

Mat PsdBlock::evaluate(const Vec& x) const {
    Mat m = constant_matrix();
    for (const auto& [var, entries] : coeff)
        for (const auto& t : entries) m(t.row, t.col) += x(var) * t.value;
    return m;
}

int VarLayout::omega_real_index(int i, int j) const {
    // column-major upper triangle including the diagonal
    return omega_offset + j * (j + 1) / 2 + i;
}

int VarLayout::omega_imag_index(int i, int j) const {
    const int reals = n_relays * (n_relays + 1) / 2;
    return omega_offset + reals + j * (j - 1) / 2 + i;
}

CVec VarLayout::unpack_w(const Vec& x) const {
    return unlift_complex(x.segment(w_offset, 2 * n_relays));
}

CMat VarLayout::unpack_omega(const Vec& x) const {
    if (!has_omega()) return CMat();
    CMat omega(n_relays, n_relays);
    for (int j = 0; j < n_relays; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double re = x(omega_real_index(i, j));
            const double im = (i == j) ? 0.0 : x(omega_imag_index(i, j));
            omega(i, j) = Complex(re, im);
            omega(j, i) = Complex(re, -im);
        }
    }
    return omega;
}

namespace {

double block_scale(double data_inf) { return std::max(1.0, data_inf); }

}  // namespace

double ConicProblem::max_violation(const Vec& x) const {
    double worst = 0.0;
    for (const auto& row : linear) {
        const double lhs = row.a.dot(x);
        const double scale = block_scale(std::max(row.a.cwiseAbs().maxCoeff(), std::abs(row.rhs)));
        const double v = (row.sense == Sense::eq) ? std::abs(lhs - row.rhs)
                                                  : std::max(0.0, lhs - row.rhs);
        worst = std::max(worst, v / scale);
    }
    for (const auto& soc : socs) {
        Vec u = soc.map * x + soc.offset;
        const double scale = block_scale(
            std::max(soc.map.cwiseAbs().maxCoeff(), soc.offset.cwiseAbs().maxCoeff()));
        const double v = u.tail(u.size() - 1).norm() - u(0);
        worst = std::max(worst, std::max(0.0, v) / scale);
    }
    for (const auto& psd : psds) {
        Mat m = psd.evaluate(x);
        const double scale = block_scale(m.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::max(0.0, -eig.eigenvalues().minCoeff()) / scale);
    }
    return worst;
}

void ConicProblem::dump(std::ostream& os) const {
    os << "conic problem: " << n_vars << " variables\n";
    os << "  layout: w@" << layout.w_offset;
    if (layout.has_omega()) os << " omega@" << layout.omega_offset;
    if (layout.rho_offset >= 0) os << " rho@" << layout.rho_offset;
    if (layout.varrho_offset >= 0) os << " varrho@" << layout.varrho_offset;
    os << "\n";
    os << "  cost nnz: " << (cost.size() ? (cost.array() != 0.0).count() : 0) << "\n";
    for (const auto& row : linear) {
        os << "  linear " << (row.sense == Sense::eq ? "[=] " : "[<=] ") << row.label
           << " rhs=" << row.rhs << " nnz=" << (row.a.array() != 0.0).count() << "\n";
    }
    for (const auto& soc : socs)
        os << "  soc dim=" << soc.map.rows() << " " << soc.label << "\n";
    for (const auto& psd : psds) {
        std::size_t nnz = psd.constant.size();
        for (const auto& [var, entries] : psd.coeff) nnz += entries.size();
        os << "  psd dim=" << psd.dim << " " << psd.label << " entries=" << nnz << "\n";
    }
}

const char* to_string(SolverResult::Status status) {
    switch (status) {
        case SolverResult::Status::feasible: return "feasible";
        case SolverResult::Status::infeasible: return "infeasible";
        case SolverResult::Status::inaccurate: return "inaccurate";
        case SolverResult::Status::error: return "error";
    }
    return "unknown";
}

}  // namespace relaybf::conic
