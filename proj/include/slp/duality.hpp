#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "slp/ci_system.hpp"

namespace slp {

// The power-minimization and margin-maximization problems over the same
// constraint geometry are a scaling pair: the balancing solution under power
// budget p is the power-minimal solution stretched to spend exactly p, and
// the achieved margin is the stretch factor. These helpers make that one-step
// conversion explicit; bisection_sb is the slow reference route that searches
// the margin directly and should land on the same answer.

struct SBResult {
    Vec x;
    double mu = 0.0;          // achieved common margin, measured on the returned x
    double power_used = 0.0;  // ||x||^2
    int pm_solves = 0;        // only filled by bisection_sb
};

// min over inequality rows of (a_j^T x) / b_j. Equality rows are excluded
// from the minimum; if eq_deviation is given it receives
// max_j |a_j^T x - mu b_j| over equality rows so callers can verify the row
// levels are consistent with the margin. A system with only equality rows
// takes the minimum over those instead. Throws on b_j <= 0.
double evaluate_balance(const CISystem& sys, const Vec& x, double* eq_deviation = nullptr);

// Scale a power-minimal solution up to the budget: x_sb = sqrt(p / p_pm) x_pm,
// mu = sqrt(p / p_pm). Requires p_pm > 0 and budget > 0.
SBResult pm_to_sb(const Vec& x_pm, double pm_power, double budget);

// Inverse direction: x_pm = x_sb / mu, p_pm = budget / mu^2. Requires mu > 0.
std::pair<Vec, double> sb_to_pm(const Vec& x_sb, double mu, double budget);

// Any routine that returns a power-minimal solution and its power for a
// given system.
using PmSolver = std::function<std::pair<Vec, double>(const CISystem&)>;

PmSolver oracle_pm_solver(double tol = 1e-9, int max_iters = 2000000, bool accelerated = true);

// Reference balancing solver: bisect on the threshold scale alpha, solving a
// power-minimization at each probe, until the bracket is narrower than
// tol_mu; the final solution is rescaled to spend exactly the budget. Kept
// deliberately independent of the scaling identities it is used to verify.
SBResult bisection_sb(const CISystem& sys, double budget, const PmSolver& solve, double tol_mu = 1e-4);

}  // namespace slp
