#include "slp/oracle.hpp"

#include <cmath>

namespace slp {

double KKTReport::max_residual() const {
    return std::max(std::max(stationarity, primal_infeas), std::max(dual_infeas, complementarity));
}

KKTReport kkt_check(const CISystem& sys, const Vec& x, const Vec& lambda) {
    KKTReport rep;
    Vec ax = matvec(sys.A, x);
    Vec atl = matvec_transpose(sys.A, lambda);
    for (int i = 0; i < sys.cols(); ++i) rep.stationarity = std::max(rep.stationarity, std::fabs(2.0 * x[i] - atl[i]));
    for (int j = 0; j < sys.rows(); ++j) {
        double r = ax[j] - sys.b[j];
        if (sys.eq_mask[j]) {
            rep.primal_infeas = std::max(rep.primal_infeas, std::fabs(r));
        } else {
            rep.primal_infeas = std::max(rep.primal_infeas, std::max(-r, 0.0));
            rep.dual_infeas = std::max(rep.dual_infeas, std::max(-lambda[j], 0.0));
            rep.complementarity = std::max(rep.complementarity, std::fabs(lambda[j] * r));
        }
    }
    return rep;
}

namespace {

// lambda_max of a symmetric PSD matrix by power iteration.
double lambda_max_sym(const Mat& g, double rel_tol, int max_iters) {
    int n = g.rows();
    Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double est = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vec w = matvec(g, v);
        double wn = norm2(w);
        if (wn == 0.0) return 0.0;
        double rayleigh = dot(v, w);
        for (int i = 0; i < n; ++i) v[i] = w[i] / wn;
        if (it > 0 && std::fabs(rayleigh - est) <= rel_tol * std::fabs(rayleigh)) return rayleigh;
        est = rayleigh;
    }
    return est;
}

struct DualWork {
    const CISystem& sys;
    Mat gram;  // A A^T

    explicit DualWork(const CISystem& s) : sys(s) {
        int m = s.rows();
        gram = Mat(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                double acc = 0.0;
                for (int c = 0; c < s.cols(); ++c) acc += s.A(i, c) * s.A(j, c);
                gram(i, j) = acc;
                gram(j, i) = acc;
            }
    }

    double dual_value(const Vec& lam, const Vec& glam) const {
        // b^T lam - (1/4) lam^T G lam
        return dot(sys.b, lam) - 0.25 * dot(lam, glam);
    }

    // Residuals in multiplier space, using A x = G lam / 2; avoids touching A
    // in the hot loop.
    double residual(const Vec& lam, const Vec& glam) const {
        double worst = 0.0;
        for (int j = 0; j < sys.rows(); ++j) {
            double r = 0.5 * glam[j] - sys.b[j];
            if (sys.eq_mask[j]) {
                worst = std::max(worst, std::fabs(r));
            } else {
                worst = std::max(worst, std::max(-r, 0.0));
                worst = std::max(worst, std::max(-lam[j], 0.0));
                worst = std::max(worst, std::fabs(lam[j] * r));
            }
        }
        return worst;
    }
};

OracleResult finish(const CISystem& sys, Vec lam, int iters, const DualWork& work) {
    OracleResult res;
    Vec atl = matvec_transpose(sys.A, lam);
    res.x.resize(sys.cols());
    for (int i = 0; i < sys.cols(); ++i) res.x[i] = 0.5 * atl[i];
    Vec glam = matvec(work.gram, lam);
    res.dual_objective = work.dual_value(lam, glam);
    res.lambda = std::move(lam);
    res.kkt = kkt_check(sys, res.x, res.lambda);
    res.iters = iters;
    res.objective = norm2_sq(res.x);
    return res;
}

}  // namespace

OracleResult solve_pm_dual(const CISystem& sys, double tol, int max_iters, bool accelerated) {
    if (tol <= 0.0) throw std::invalid_argument("solve_pm_dual: tol must be positive");
    DualWork work(sys);
    int m = sys.rows();

    double lmax = lambda_max_sym(work.gram, 1e-10, 20000);
    if (lmax == 0.0) {
        // A == 0: x = 0 is the only candidate; feasible iff b never demands
        // anything positive.
        OracleResult res = finish(sys, Vec(m, 0.0), 0, work);
        if (res.kkt.certified(tol)) return res;
        throw OracleFailure("solve_pm_dual: zero matrix with unreachable thresholds", std::move(res));
    }
    double lipschitz = 0.5 * lmax;
    double step = 1.0 / lipschitz;

    Vec lam(m, 0.0), y(m, 0.0);
    double t_momentum = 1.0;
    double prev_value = -1e300;
    const int check_every = 25;

    for (int it = 1; it <= max_iters; ++it) {
        const Vec& point = accelerated ? y : lam;
        Vec gl = matvec(work.gram, point);
        Vec next(m);
        for (int j = 0; j < m; ++j) {
            double v = point[j] + step * (sys.b[j] - 0.5 * gl[j]);
            if (!sys.eq_mask[j] && v < 0.0) v = 0.0;
            next[j] = v;
        }
        if (accelerated) {
            // Gradient-style restart: kill the momentum when it points
            // against the direction of progress.
            double swing = 0.0;
            for (int j = 0; j < m; ++j) swing += (y[j] - next[j]) * (next[j] - lam[j]);
            if (swing > 0.0) {
                t_momentum = 1.0;
                y = next;
            } else {
                double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
                double w = (t_momentum - 1.0) / t_next;
                y.resize(m);
                for (int j = 0; j < m; ++j) y[j] = next[j] + w * (next[j] - lam[j]);
                t_momentum = t_next;
            }
            lam = std::move(next);
        } else {
            lam = std::move(next);
        }

        if (it % check_every == 0 || it == max_iters) {
            Vec glam = matvec(work.gram, lam);
            double value = work.dual_value(lam, glam);
            if (work.residual(lam, glam) < tol) {
                OracleResult res = finish(sys, lam, it, work);
                if (res.kkt.certified(tol)) return res;
                // Multiplier-space residual passed but the honest check with
                // A did not; keep iterating with whatever precision is left.
            }
            // Halve the step only on a genuine divergence (step too long for the
            // true curvature); rounding noise in the value must not shrink it.
            if (!accelerated && value < prev_value - 1e-12 * (1.0 + std::fabs(prev_value))) step *= 0.5;
            prev_value = value;
        }
    }
    throw OracleFailure("solve_pm_dual: no certificate within iteration budget", finish(sys, lam, max_iters, work));
}

}  // namespace slp
