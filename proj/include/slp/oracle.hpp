#pragma once

#include <stdexcept>
#include <vector>

#include "slp/ci_system.hpp"

namespace slp {

// First-order optimality residuals for min ||x||^2 s.t. A x >= b (with
// equality rows per eq_mask). All four vanish exactly at the optimum.
struct KKTReport {
    double stationarity = 0.0;     // ||2x - A^T lambda||_inf
    double primal_infeas = 0.0;    // (b - Ax)+ on inequality rows, |Ax - b| on equality rows
    double dual_infeas = 0.0;      // (-lambda_i)+ on inequality rows (equality multipliers are free)
    double complementarity = 0.0;  // max over inequality rows of |lambda_i * (Ax - b)_i|

    double max_residual() const;
    bool certified(double tol) const { return max_residual() < tol; }
};

KKTReport kkt_check(const CISystem& sys, const Vec& x, const Vec& lambda);

struct OracleResult {
    Vec x;
    Vec lambda;
    KKTReport kkt;
    int iters = 0;
    double objective = 0.0;       // ||x||^2
    double dual_objective = 0.0;  // b^T lambda - (1/4) ||A^T lambda||^2
};

// Raised when the dual iteration exhausts its budget without producing a
// certificate (ill-posed systems included: an infeasible primal shows up as
// an unbounded dual). Carries whatever iterate was reached.
struct OracleFailure : std::runtime_error {
    OracleResult partial;
    OracleFailure(std::string msg, OracleResult p) : std::runtime_error(std::move(msg)), partial(std::move(p)) {}
};

// Independent reference solver: projected gradient ascent on the Lagrangian
// dual (a bound-constrained QP in the multipliers), x recovered as
// (1/2) A^T lambda. Fixed step 1/L with L = lambda_max(A A^T) / 2 from power
// iteration; a halving safeguard guards against a rounding-induced dual
// decrease. The plain method is deliberately simple to audit; `accelerated`
// switches on Nesterov momentum with gradient restarts for badly conditioned
// systems, with the certificate computed the same way in both cases.
OracleResult solve_pm_dual(const CISystem& sys, double tol = 1e-9, int max_iters = 500000, bool accelerated = false);

}  // namespace slp
