#include "slp/duality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "slp/oracle.hpp"

namespace slp {

double evaluate_balance(const CISystem& sys, const Vec& x, double* eq_deviation) {
    Vec ax = matvec(sys.A, x);
    double mu = std::numeric_limits<double>::infinity();
    bool any_ineq = false;
    for (int j = 0; j < sys.rows(); ++j) {
        if (sys.b[j] <= 0.0) throw std::invalid_argument("evaluate_balance: nonpositive threshold row");
        if (!sys.eq_mask[j]) {
            any_ineq = true;
            mu = std::min(mu, ax[j] / sys.b[j]);
        }
    }
    if (!any_ineq) {
        for (int j = 0; j < sys.rows(); ++j) mu = std::min(mu, ax[j] / sys.b[j]);
    }
    if (eq_deviation) {
        double dev = 0.0;
        if (any_ineq)
            for (int j = 0; j < sys.rows(); ++j)
                if (sys.eq_mask[j]) dev = std::max(dev, std::fabs(ax[j] - mu * sys.b[j]));
        *eq_deviation = dev;
    }
    return mu;
}

SBResult pm_to_sb(const Vec& x_pm, double pm_power, double budget) {
    if (budget <= 0.0) throw std::invalid_argument("pm_to_sb: budget must be positive");
    if (pm_power <= 0.0) throw std::invalid_argument("pm_to_sb: power-minimal solution must have positive power");
    double scale = std::sqrt(budget / pm_power);
    SBResult out;
    out.x = scaled(x_pm, scale);
    out.mu = scale;
    out.power_used = norm2_sq(out.x);
    return out;
}

std::pair<Vec, double> sb_to_pm(const Vec& x_sb, double mu, double budget) {
    if (mu <= 0.0) throw std::invalid_argument("sb_to_pm: mu must be positive");
    if (budget <= 0.0) throw std::invalid_argument("sb_to_pm: budget must be positive");
    return {scaled(x_sb, 1.0 / mu), budget / (mu * mu)};
}

PmSolver oracle_pm_solver(double tol, int max_iters, bool accelerated) {
    return [tol, max_iters, accelerated](const CISystem& sys) {
        OracleResult res = solve_pm_dual(sys, tol, max_iters, accelerated);
        return std::pair<Vec, double>(std::move(res.x), res.objective);
    };
}

SBResult bisection_sb(const CISystem& sys, double budget, const PmSolver& solve, double tol_mu) {
    if (budget <= 0.0) throw std::invalid_argument("bisection_sb: budget must be positive");
    if (tol_mu <= 0.0) throw std::invalid_argument("bisection_sb: tol_mu must be positive");

    auto solve_scaled = [&](double alpha) {
        CISystem probe = sys;
        for (double& v : probe.b) v *= alpha;
        return solve(probe);
    };

    SBResult out;
    auto [x1, p1] = solve(sys);
    ++out.pm_solves;
    if (p1 <= 0.0) throw std::runtime_error("bisection_sb: thresholds are free, margin is unbounded");

    double lo = 0.0;
    double hi = 2.0 * std::sqrt(budget / p1);
    for (int grow = 0;; ++grow) {
        auto [xh, ph] = solve_scaled(hi);
        ++out.pm_solves;
        if (ph > budget) break;
        if (grow >= 60) throw std::runtime_error("bisection_sb: failed to bracket the budget");
        lo = hi;
        hi *= 2.0;
    }

    Vec x_best;
    double p_best = 0.0;
    if (lo > 0.0) {
        auto [xl, pl] = solve_scaled(lo);
        ++out.pm_solves;
        x_best = std::move(xl);
        p_best = pl;
    }
    int guard = 0;
    while (hi - lo > tol_mu) {
        if (++guard > 200) throw std::runtime_error("bisection_sb: bracket failed to shrink");
        double mid = 0.5 * (lo + hi);
        auto [xm, pm] = solve_scaled(mid);
        ++out.pm_solves;
        if (pm <= budget) {
            lo = mid;
            x_best = std::move(xm);
            p_best = pm;
        } else {
            hi = mid;
        }
    }
    if (p_best <= 0.0 || x_best.empty()) throw std::runtime_error("bisection_sb: no feasible probe found");

    out.x = scaled(x_best, std::sqrt(budget / p_best));
    out.power_used = norm2_sq(out.x);
    out.mu = evaluate_balance(sys, out.x);
    return out;
}

}  // namespace slp
