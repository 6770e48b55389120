#include "slp/pif_solver.hpp"

#include <cmath>

namespace slp {

PJADMMConfig default_config(int users, int antennas, ModKind kind, SlpMode mode) {
    if (users <= 0 || antennas <= 0) throw std::invalid_argument("default_config: bad dimensions");
    PJADMMConfig cfg;
    bool qam = kind == ModKind::SquareQAM;
    bool fully_loaded = users == antennas;

    struct Preset {
        double rho, beta;
    };
    auto preset = [&]() -> std::optional<Preset> {
        if (users == 8 && antennas == 8) return Preset{qam ? 0.8 : 0.3, 1.0};
        if (users == 12 && antennas == 12) return Preset{qam ? 0.8 : 0.4, 1.0};
        // Over-relaxation buys most of the accuracy at the short fixed runs
        // this size is benchmarked with; QAM tolerates far less of it.
        if (users == 12 && antennas == 16) return Preset{qam ? 0.07 : 0.075, qam ? 1.1 : 1.65};
        if (users == 24 && antennas == 32) return Preset{0.03, 1.0};
        if (users == 48 && antennas == 64) return Preset{0.015, 1.0};
        return std::nullopt;
    }();

    if (preset) {
        cfg.rho = preset->rho;
        cfg.beta = preset->beta;
        if (!fully_loaded) {
            // Under-loaded arrays settle fast; a fixed short run is the
            // benchmarked protocol.
            cfg.fixed_iters = qam ? 150 : 40;
        } else if (!qam) {
            cfg.delta_tol = 1e-2;
            cfg.max_iters = 100;
        } else if (mode == SlpMode::PowerMin) {
            cfg.delta_tol = users == 8 ? 1e-7 : 1e-6;
            cfg.max_iters = 4000;
        } else {
            cfg.delta_tol = users == 8 ? 1e-4 : 1e-3;
            cfg.max_iters = 300;
        }
    } else {
        cfg.rho = 0.06 * 192.0 / (static_cast<double>(users) * antennas);
        cfg.delta_tol = 1e-8;
        cfg.max_iters = 5000;
        cfg.preset_tuned = false;
    }
    return cfg;
}

SolverState init_state(const CISystem& sys) {
    SolverState st;
    st.x.assign(sys.cols(), 0.0);
    st.c.assign(sys.rows(), 0.0);
    st.lambda.assign(sys.rows(), 0.0);
    st.ax.assign(sys.rows(), 0.0);
    return st;
}

void update_c(SolverState& st, const CISystem& sys, double rho, bool generic_rows) {
    int m = sys.rows();
    if (generic_rows) {
        for (int j = 0; j < m; ++j) {
            if (sys.eq_mask[j]) {
                st.c[j] = 0.0;
            } else {
                double v = st.ax[j] - sys.b[j] - st.lambda[j] / rho;
                st.c[j] = v > 0.0 ? v : 0.0;
            }
        }
    } else {
        for (int j = 0; j < m; ++j) {
            double v = st.ax[j] - sys.b[j] - st.lambda[j] / rho;
            st.c[j] = v > 0.0 ? v : 0.0;
        }
    }
}

Vec update_x_blocks(const SolverState& st, const CISystem& sys, double rho, double tau) {
    int m = sys.rows(), n = sys.cols();
    Vec r(m);
    for (int j = 0; j < m; ++j) r[j] = -st.ax[j] + sys.b[j] + st.c[j] + st.lambda[j] / rho;
    Vec g = matvec_transpose(sys.A, r);
    Vec xnew(n);
    double denom = 2.0 + tau;
    for (int i = 0; i < n; ++i) xnew[i] = (tau * st.x[i] + rho * g[i]) / denom;
    return xnew;
}

void update_lambda(SolverState& st, const CISystem& sys, double rho, double beta) {
    double brho = beta * rho;
    for (int j = 0; j < sys.rows(); ++j) st.lambda[j] += brho * (-st.ax[j] + sys.b[j] + st.c[j]);
}

namespace {

double kkt_residual_of(const SolverState& st, const CISystem& sys) {
    Vec atl = matvec_transpose(sys.A, st.lambda);
    double stat = 0.0;
    for (int i = 0; i < sys.cols(); ++i) stat = std::max(stat, std::fabs(2.0 * st.x[i] - atl[i]));
    double split = 0.0;
    for (int j = 0; j < sys.rows(); ++j) split = std::max(split, std::fabs(st.ax[j] - sys.b[j] - st.c[j]));
    return std::max(stat, split);
}

}  // namespace

PifResult solve_pm(const CISystem& sys, const PJADMMConfig& cfg, std::vector<IterationRecord>* trace) {
    if (cfg.rho <= 0.0) throw std::invalid_argument("solve_pm: rho must be positive");
    if (cfg.beta <= 0.0 || cfg.beta >= 2.0) throw std::invalid_argument("solve_pm: beta must lie in (0, 2)");
    if (cfg.tau && *cfg.tau < 0.0) throw std::invalid_argument("solve_pm: tau must be nonnegative");
    if (cfg.fixed_iters && *cfg.fixed_iters < 1) throw std::invalid_argument("solve_pm: fixed_iters must be >= 1");
    if (cfg.max_iters < 1) throw std::invalid_argument("solve_pm: max_iters must be >= 1");

    // Validates the partition arguments even though the update itself is
    // partition-invariant; a bad block count should fail loudly.
    make_partition(sys, cfg.partition, cfg.n_blocks);

    double a_norm = 0.0;
    double tau;
    if (cfg.tau) {
        tau = *cfg.tau;
    } else {
        a_norm = spectral_norm(sys.A);
        tau = cfg.tau_factor * cfg.rho * a_norm * a_norm;
    }

    bool has_eq = false;
    for (auto e : sys.eq_mask) has_eq = has_eq || e != 0;
    bool generic_rows = has_eq || cfg.force_generic_rows;

    SolverState st = init_state(sys);
    double diverge_bound = 1e8 * (1.0 + norm2(sys.b));
    long long m = sys.rows(), n = sys.cols();
    long long per_iter_flops = 4 * m * n + 11 * m + 7 * n + 1;
    int limit = cfg.fixed_iters ? *cfg.fixed_iters : cfg.max_iters;

    SolverReport rep;
    rep.rho = cfg.rho;
    rep.tau = tau;
    rep.a_norm = a_norm;

    for (int t = 0; t < limit; ++t) {
        update_c(st, sys, cfg.rho, generic_rows);
        Vec xnew = update_x_blocks(st, sys, cfg.rho, tau);
        double dsq = 0.0;
        for (int i = 0; i < sys.cols(); ++i) {
            double d = xnew[i] - st.x[i];
            dsq += d * d;
        }
        double delta = std::sqrt(dsq);
        st.x = std::move(xnew);
        st.ax = matvec(sys.A, st.x);
        update_lambda(st, sys, cfg.rho, cfg.beta);
        st.iter = t + 1;
        rep.flop_estimate += per_iter_flops;
        rep.final_delta = delta;
        rep.iters = st.iter;

        if (trace) {
            IterationRecord rec;
            rec.iter = st.iter;
            rec.objective = norm2_sq(st.x);
            rec.delta = delta;
            rec.max_infeas = max_infeasibility(sys, st.x);
            rec.kkt_residual = kkt_residual_of(st, sys);
            trace->push_back(rec);
        }
        if (norm2(st.x) > diverge_bound) throw DivergenceError(st.iter);
        if (!cfg.fixed_iters && delta <= cfg.delta_tol) {
            rep.hit_delta_tol = true;
            break;
        }
    }

    rep.objective = norm2_sq(st.x);
    rep.max_infeas = max_infeasibility(sys, st.x);
    rep.kkt_residual = kkt_residual_of(st, sys);
    if (cfg.fixed_iters) rep.hit_delta_tol = false;

    PifResult out;
    out.x = std::move(st.x);
    out.c = std::move(st.c);
    out.lambda = std::move(st.lambda);
    out.report = rep;
    return out;
}

}  // namespace slp
