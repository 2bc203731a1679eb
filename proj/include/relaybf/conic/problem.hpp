#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "relaybf/types.hpp"

namespace relaybf::conic {

enum class Sense { le, eq };

struct LinearRow {
    Eigen::RowVectorXd a;
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string label;
};

/// map * x + offset must lie in the second-order cone (first entry is the
/// cone "t" component).
struct SocBlock {
    Mat map;
    Vec offset;
    std::string label;
};

struct MatrixEntry {
    MatrixEntry(int r, int c, double v) : row(r), col(c), value(v) {}
    int row;
    int col;
    double value;
};

/// constant + sum_k x_k * coeff[k] must be positive semidefinite. Coefficient
/// matrices are stored as sparse symmetric entry lists.
struct PsdBlock {
    int dim = 0;
    std::vector<MatrixEntry> constant;
    std::map<int, std::vector<MatrixEntry>> coeff;
    std::string label;

    Mat constant_matrix() const;
    Mat coeff_matrix(int var) const;
    Mat evaluate(const Vec& x) const;
};

/// Where the named variable groups live inside the decision vector.
struct VarLayout {
    int n_relays = 0;
    int n_interferers = 0;
    int w_offset = 0;        // 2*n_relays reals
    int omega_offset = -1;   // n_relays^2 reals when present
    int rho_offset = -1;     // 4 reals when present (p1, p2, s1, s2)
    int varrho_offset = -1;  // 4*n_interferers reals when present

    bool has_omega() const { return omega_offset >= 0; }
    CVec unpack_w(const Vec& x) const;
    CMat unpack_omega(const Vec& x) const;
    // Hermitian parameterization of omega: real upper triangle then strict
    // imaginary upper triangle.
    int omega_var_count() const { return n_relays * n_relays; }
    int omega_real_index(int i, int j) const;  // i <= j
    int omega_imag_index(int i, int j) const;  // i < j
};

/// Real-lifted feasibility problem: minimize cost subject to linear rows,
/// second-order cone blocks, and semidefinite blocks.
struct ConicProblem {
    int n_vars = 0;
    Vec cost;
    std::vector<LinearRow> linear;
    std::vector<SocBlock> socs;
    std::vector<PsdBlock> psds;
    VarLayout layout;

    /// Largest constraint violation of x, each block scaled by its own data
    /// magnitude so the result is comparable to a solver tolerance.
    double max_violation(const Vec& x) const;

    /// Human-readable listing of variables and constraint blocks.
    void dump(std::ostream& os) const;
};

struct SolverResult {
    enum class Status { feasible, infeasible, inaccurate, error };
    Status status = Status::error;
    Vec x;
    Vec w_lift;
    Mat omega_lift;  // real lift of omega; empty when the problem has none
    double residuals = 0.0;
    std::chrono::duration<double> solve_time{0.0};
    int iterations = 0;
};

const char* to_string(SolverResult::Status status);

}  // namespace relaybf::conic
