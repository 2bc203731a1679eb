#pragma once

#include "relaybf/conic/problem.hpp"

namespace relaybf::conic {

struct SolverSettings {
    double tol = 1e-8;
    int max_iters = 200;
    int refine_rounds = 2;
};

/// Decides feasibility of the linear/SOC/PSD system with a primal-dual
/// interior-point method on the homogeneous self-dual embedding. A feasible
/// verdict always comes with a point whose violations were re-checked
/// against the original problem data; numerical failures surface as
/// inaccurate or error, never as a silent feasible.
SolverResult solve_feasibility(const ConicProblem& p, double tol = 1e-8);
SolverResult solve_feasibility(const ConicProblem& p, const SolverSettings& settings);

}  // namespace relaybf::conic
