#include <doctest.h>

#include <cmath>
#include <sstream>

#include "relaybf/conic/solver.hpp"
#include "relaybf/rng.hpp"

using namespace relaybf;
using namespace relaybf::conic;

namespace {

ConicProblem empty_problem(int n_vars) {
    ConicProblem p;
    p.n_vars = n_vars;
    p.cost = Vec::Zero(n_vars);
    p.layout.n_relays = 0;
    p.layout.w_offset = 0;
    return p;
}

LinearRow le_row(int n_vars, int var, double coeff, double rhs) {
    LinearRow row;
    row.a = Eigen::RowVectorXd::Zero(n_vars);
    row.a(var) = coeff;
    row.sense = Sense::le;
    row.rhs = rhs;
    return row;
}

}  // namespace

TEST_CASE("contradicting linear rows are infeasible") {
    ConicProblem p = empty_problem(1);
    p.linear.push_back(le_row(1, 0, -1.0, -1.0));  // x >= 1
    p.linear.push_back(le_row(1, 0, 1.0, 0.0));    // x <= 0
    // keep the variable in a cone so the system is bounded
    SocBlock soc;
    soc.map = Mat::Zero(2, 1);
    soc.map(1, 0) = 1.0;
    soc.offset = Vec::Zero(2);
    soc.offset(0) = 10.0;
    p.socs.push_back(std::move(soc));
    SolverResult res = solve_feasibility(p, 1e-8);
    CHECK(res.status == SolverResult::Status::infeasible);
}

TEST_CASE("ball intersected with a plane returns a consistent point") {
    // ||[x1; x2]|| <= 1, x1 = 0.5
    ConicProblem p = empty_problem(2);
    LinearRow eq;
    eq.a = Eigen::RowVectorXd::Zero(2);
    eq.a(0) = 1.0;
    eq.sense = Sense::eq;
    eq.rhs = 0.5;
    p.linear.push_back(std::move(eq));
    SocBlock soc;
    soc.map = Mat::Zero(3, 2);
    soc.map(1, 0) = 1.0;
    soc.map(2, 1) = 1.0;
    soc.offset = Vec::Zero(3);
    soc.offset(0) = 1.0;
    p.socs.push_back(std::move(soc));
    SolverResult res = solve_feasibility(p, 1e-8);
    REQUIRE(res.status == SolverResult::Status::feasible);
    CHECK(res.x(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(res.x(1)) <= std::sqrt(0.75) + 1e-6);
    CHECK(res.residuals <= 1e-6);
}

TEST_CASE("psd scalar block feasibility threshold") {
    // [[x, 1], [1, 1]] >= 0 requires x >= 1
    auto make = [](double cap) {
        ConicProblem p = empty_problem(1);
        PsdBlock psd;
        psd.dim = 2;
        psd.constant.emplace_back(0, 1, 1.0);
        psd.constant.emplace_back(1, 0, 1.0);
        psd.constant.emplace_back(1, 1, 1.0);
        psd.coeff[0].emplace_back(0, 0, 1.0);
        p.psds.push_back(std::move(psd));
        p.linear.push_back(le_row(1, 0, 1.0, cap));
        return p;
    };
    CHECK(solve_feasibility(make(0.5), 1e-8).status == SolverResult::Status::infeasible);
    SolverResult res = solve_feasibility(make(1.5), 1e-8);
    REQUIRE(res.status == SolverResult::Status::feasible);
    CHECK(res.x(0) >= 1.0 - 1e-6);
    CHECK(res.x(0) <= 1.5 + 1e-6);
}

TEST_CASE("minimum-trace objective drives a psd variable to its floor") {
    // minimize x subject to [[x, 1], [1, 1]] >= 0: optimum x = 1
    ConicProblem p = empty_problem(1);
    p.cost(0) = 1.0;
    PsdBlock psd;
    psd.dim = 2;
    psd.constant.emplace_back(0, 1, 1.0);
    psd.constant.emplace_back(1, 0, 1.0);
    psd.constant.emplace_back(1, 1, 1.0);
    psd.coeff[0].emplace_back(0, 0, 1.0);
    p.psds.push_back(std::move(psd));
    p.linear.push_back(le_row(1, 0, 1.0, 50.0));
    SolverResult res = solve_feasibility(p, 1e-8);
    REQUIRE(res.status == SolverResult::Status::feasible);
    CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("soc norm minimization hits the analytic optimum") {
    // minimize c'x subject to ||x|| <= 1 (epigraph via fixed cone offset)
    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 4);
        ConicProblem p = empty_problem(n);
        for (int i = 0; i < n; ++i) p.cost(i) = rng.gaussian();
        SocBlock soc;
        soc.map = Mat::Zero(n + 1, n);
        soc.map.bottomRows(n).setIdentity();
        soc.offset = Vec::Zero(n + 1);
        soc.offset(0) = 1.0;
        p.socs.push_back(std::move(soc));
        SolverResult res = solve_feasibility(p, 1e-8);
        REQUIRE(res.status == SolverResult::Status::feasible);
        CHECK(p.cost.dot(res.x) == doctest::Approx(-p.cost.norm()).epsilon(1e-6));
    }
}

TEST_CASE("randomly generated mixed-cone systems with interior points are feasible") {
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 5);
        ConicProblem p = empty_problem(n);
        Vec x0(n);
        for (int i = 0; i < n; ++i) x0(i) = rng.gaussian();
        // linear rows satisfied with slack
        for (int r = 0; r < 3; ++r) {
            LinearRow row;
            row.a = Eigen::RowVectorXd::Zero(n);
            for (int i = 0; i < n; ++i) row.a(i) = rng.gaussian();
            row.sense = Sense::le;
            row.rhs = row.a.dot(x0) + 0.5 + rng.uniform();
            p.linear.push_back(std::move(row));
        }
        // one soc with interior slack at x0
        SocBlock soc;
        const int q = 3;
        soc.map = Mat::Zero(q, n);
        for (int i = 1; i < q; ++i)
            for (int j = 0; j < n; ++j) soc.map(i, j) = rng.gaussian();
        soc.offset = Vec::Zero(q);
        soc.offset(0) = (soc.map * x0).tail(q - 1).norm() + 1.0;
        soc.offset.tail(q - 1) -= (soc.map * x0).tail(q - 1) * 0.0;
        p.socs.push_back(std::move(soc));
        // small psd block: diag-dominant affine map at x0
        PsdBlock psd;
        psd.dim = 3;
        for (int i = 0; i < 3; ++i) psd.constant.emplace_back(i, i, 2.0);
        for (int v = 0; v < 2; ++v) {
            psd.coeff[v].emplace_back(0, v + 1, 0.3);
            psd.coeff[v].emplace_back(v + 1, 0, 0.3);
        }
        p.psds.push_back(std::move(psd));
        // bound every variable so the feasible set is compact
        for (int i = 0; i < n; ++i) {
            p.linear.push_back(le_row(n, i, 1.0, std::abs(x0(i)) + 5.0));
            p.linear.push_back(le_row(n, i, -1.0, std::abs(x0(i)) + 5.0));
        }
        SolverResult res = solve_feasibility(p, 1e-8);
        REQUIRE(res.status == SolverResult::Status::feasible);
        CHECK(res.residuals <= 1e-6);
        CHECK(p.max_violation(res.x) <= 1e-6);
    }
}

TEST_CASE("quadratic and second-order forms of the product bound agree") {
    // a'a <= alpha*beta  <=>  ||[alpha - beta; 2a]|| <= alpha + beta
    Rng rng(23);
    int agree = 0, total = 0;
    for (int k = 0; k < 100000; ++k) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 4);
        CVec a = rng.cgaussian_vector(n);
        if (rng.uniform() < 0.05) a.setZero();
        double alpha = rng.uniform() < 0.05 ? 0.0 : std::abs(rng.gaussian());
        double beta = rng.uniform() < 0.05 ? 0.0 : std::abs(rng.gaussian());
        const double quad = a.squaredNorm();
        if (std::abs(quad - alpha * beta) < 1e-12) continue;  // borderline excluded
        const bool lhs = quad <= alpha * beta;
        const double t = std::sqrt((alpha - beta) * (alpha - beta) + 4.0 * quad);
        const bool rhs = t <= alpha + beta;
        ++total;
        if (lhs == rhs) ++agree;
    }
    CHECK(agree == total);
    CHECK(total > 90000);
}

TEST_CASE("problem dump lists blocks") {
    ConicProblem p = empty_problem(2);
    p.linear.push_back(le_row(2, 0, 1.0, 1.0));
    p.linear.back().label = "cap";
    SocBlock soc;
    soc.map = Mat::Zero(2, 2);
    soc.map(1, 1) = 1.0;
    soc.offset = Vec::Zero(2);
    soc.offset(0) = 1.0;
    soc.label = "ball";
    p.socs.push_back(std::move(soc));
    std::ostringstream os;
    p.dump(os);
    const std::string text = os.str();
    CHECK(text.find("cap") != std::string::npos);
    CHECK(text.find("ball") != std::string::npos);
    CHECK(text.find("2 variables") != std::string::npos);
}
