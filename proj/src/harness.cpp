#include "slp/harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "slp/duality.hpp"
#include "slp/oracle.hpp"

namespace slp {

ComplexChannel gen_channel(int users, int antennas, RandomStream& stream) {
    if (users <= 0 || antennas <= 0) throw std::invalid_argument("gen_channel: bad dimensions");
    ComplexChannel ch;
    ch.users = users;
    ch.antennas = antennas;
    ch.rows.reserve(static_cast<std::size_t>(users) * antennas);
    const double comp = 1.0 / std::numbers::sqrt2;  // per-component std dev for unit-variance entries
    for (int k = 0; k < users; ++k)
        for (int n = 0; n < antennas; ++n) {
            double re = stream.next_gaussian() * comp;
            double im = stream.next_gaussian() * comp;
            ch.rows.emplace_back(re, im);
        }
    return ch;
}

Vec zf_direction(const ComplexChannel& ch, const std::vector<cplx>& symbols) {
    int k_users = ch.users, nt = ch.antennas;
    if (static_cast<int>(symbols.size()) != k_users) throw std::invalid_argument("zf_direction: need one symbol per user");
    if (k_users > nt) throw std::invalid_argument("zf_direction: channel inversion needs users <= antennas");
    // Gram of the row channel: (H H^H)_{ij} = h_i^T conj(h_j).
    std::vector<cplx> gram(static_cast<std::size_t>(k_users) * k_users);
    for (int i = 0; i < k_users; ++i)
        for (int j = 0; j < k_users; ++j) {
            cplx acc = 0.0;
            for (int n = 0; n < nt; ++n) acc += ch.at(i, n) * std::conj(ch.at(j, n));
            gram[static_cast<std::size_t>(i) * k_users + j] = acc;
        }
    std::vector<cplx> u = solve_complex(std::move(gram), symbols, k_users);
    Vec x(2 * nt, 0.0);
    for (int n = 0; n < nt; ++n) {
        cplx v = 0.0;
        for (int k = 0; k < k_users; ++k) v += std::conj(ch.at(k, n)) * u[k];
        x[n] = v.real();
        x[n + nt] = v.imag();
    }
    return x;
}

Vec zf_baseline(const ComplexChannel& ch, const std::vector<cplx>& symbols, double p) {
    if (p <= 0.0) throw std::invalid_argument("zf_baseline: power must be positive");
    Vec dir = zf_direction(ch, symbols);
    double pw = norm2_sq(dir);
    if (pw == 0.0) throw std::invalid_argument("zf_baseline: zero direction (all symbols zero?)");
    return scaled(dir, std::sqrt(p / pw));
}

namespace {

constexpr std::uint64_t kChannelPurpose = 0;
constexpr std::uint64_t kSymbolPurpose = 1;
constexpr std::uint64_t kNoisePurpose = 2;

std::uint64_t stream_id(int realization, std::uint64_t purpose) {
    return (static_cast<std::uint64_t>(realization) << 8) | purpose;
}

struct SlotStats {
    double power = 0.0, mu = 0.0, iters = 0.0, infeas = 0.0;
    long long flops = 0, bit_errors = 0, bits = 0;
    bool feasible = false;
};

struct RealizationAccum {
    double power = 0.0, mu = 0.0, iters = 0.0, infeas = 0.0;
    long long flops = 0, bit_errors = 0, bits = 0;
    int feasible_slots = 0;
};

struct PointParams {
    double gamma_lin = 1.0;
    double sigma = 1.0;
};

PointParams point_params(SlpMode mode, double sweep_db, double budget) {
    PointParams pp;
    if (mode == SlpMode::PowerMin) {
        pp.gamma_lin = std::pow(10.0, sweep_db / 10.0);
        pp.sigma = 1.0;
    } else {
        pp.gamma_lin = 1.0;
        pp.sigma = std::sqrt(budget * std::pow(10.0, -sweep_db / 10.0));
    }
    return pp;
}

SlotStats simulate_slot(const Scenario& sc, SlpMode mode, const ConstellationSpec& spec, const ComplexChannel& ch,
                        const std::vector<int>& sym_idx, const PointParams& pp, const PJADMMConfig& pif_cfg,
                        RandomStream& noise) {
    CISystem sys = build_ci_system(ch, sym_idx, spec, Vec{pp.gamma_lin}, Vec{pp.sigma});
    double feas_tol = 1e-6 * (1.0 + inf_norm(sys.b));

    SlotStats st;
    Vec x;
    switch (sc.solver) {
        case SolverChoice::Pif: {
            PifResult res = solve_pm(sys, pif_cfg);
            st.iters = res.report.iters;
            st.flops = res.report.flop_estimate;
            st.infeas = res.report.max_infeas;
            if (mode == SlpMode::PowerMin) {
                x = std::move(res.x);
                st.mu = evaluate_balance(sys, x);
            } else {
                SBResult sb = pm_to_sb(res.x, res.report.objective, sc.budget);
                x = std::move(sb.x);
                st.mu = sb.mu;
            }
            break;
        }
        case SolverChoice::Oracle: {
            OracleResult res = solve_pm_dual(sys, 1e-9, 2000000, true);
            st.iters = res.iters;
            st.infeas = res.kkt.primal_infeas;
            if (mode == SlpMode::PowerMin) {
                x = std::move(res.x);
                st.mu = evaluate_balance(sys, x);
            } else {
                SBResult sb = pm_to_sb(res.x, res.objective, sc.budget);
                x = std::move(sb.x);
                st.mu = sb.mu;
            }
            break;
        }
        case SolverChoice::Zf: {
            std::vector<cplx> symbols(sys.users);
            for (int k = 0; k < sys.users; ++k) symbols[k] = spec.points[sym_idx[k]];
            if (mode == SlpMode::PowerMin) {
                // Scale the inversion so the tightest user just meets its
                // margin; with uniform thresholds this is exact.
                double zeta = 0.0;
                for (int k = 0; k < sys.users; ++k) zeta = std::max(zeta, std::sqrt(sys.gamma[k]) * sys.sigma[k]);
                x = scaled(zf_direction(ch, symbols), zeta);
                st.mu = evaluate_balance(sys, x);
                st.infeas = max_infeasibility(sys, x);
            } else {
                x = zf_baseline(ch, symbols, sc.budget);
                st.mu = evaluate_balance(sys, x);
                st.infeas = max_infeasibility(sys, scaled(x, 1.0 / st.mu));
            }
            break;
        }
    }
    st.power = norm2_sq(x);
    st.feasible = st.infeas <= feas_tol;

    // Transmit the slot: y_k = h_k^T x~ + sigma * w, w ~ CN(0,1); the
    // receiver rescales to the unit constellation before slicing.
    const double comp = 1.0 / std::numbers::sqrt2;
    for (int k = 0; k < sys.users; ++k) {
        cplx rx = 0.0;
        for (int n = 0; n < sys.antennas; ++n) rx += ch.at(k, n) * cplx(x[n], x[n + sys.antennas]);
        double wr = noise.next_gaussian() * comp, wi = noise.next_gaussian() * comp;
        rx += pp.sigma * cplx(wr, wi);
        double scale = std::sqrt(sys.gamma[k]) * sys.sigma[k];
        if (mode == SlpMode::SinrBalance) scale *= st.mu;
        int hat = detect(spec, rx / scale);
        st.bit_errors += hamming_distance(spec.bit_labels[sym_idx[k]], spec.bit_labels[hat]);
        st.bits += spec.bits_per_symbol;
    }
    return st;
}

PJADMMConfig scenario_config_impl(const Scenario& sc, SlpMode mode) {
    PJADMMConfig cfg = default_config(sc.users, sc.antennas, sc.mod_kind, mode);
    if (sc.rho) {
        cfg.rho = *sc.rho;
        cfg.preset_tuned = false;
    }
    if (sc.beta) cfg.beta = *sc.beta;
    if (sc.tau) cfg.tau = *sc.tau;
    if (sc.delta_tol) {
        cfg.delta_tol = *sc.delta_tol;
        cfg.fixed_iters.reset();
    }
    if (sc.fixed_iters) cfg.fixed_iters = *sc.fixed_iters;
    if (sc.max_iters) cfg.max_iters = *sc.max_iters;
    if (sc.partition) cfg.partition = *sc.partition;
    cfg.n_blocks = sc.n_blocks;
    return cfg;
}

RunResult run_sweep(const Scenario& sc, SlpMode mode, int jobs, bool timing) {
    if (sc.users <= 0 || sc.antennas <= 0) throw std::invalid_argument("run_sweep: bad dimensions");
    if (sc.realizations <= 0 || sc.slots <= 0) throw std::invalid_argument("run_sweep: realizations and slots must be positive");
    if (sc.sweep_db.empty()) throw std::invalid_argument("run_sweep: empty sweep");
    if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");
    ConstellationSpec spec = make_constellation(sc.mod_kind, sc.mod_order);
    if (spec.bits_per_symbol == 0)
        throw std::invalid_argument("run_sweep: modulation has no bit labeling, BER is undefined");
    PJADMMConfig cfg = scenario_config_impl(sc, mode);

    RunResult out;
    out.scenario_id = sc.id;
    int workers = std::min(jobs, sc.realizations);

    for (double db : sc.sweep_db) {
        auto t0 = std::chrono::steady_clock::now();
        PointParams pp = point_params(mode, db, sc.budget);
        std::vector<RealizationAccum> per_real(sc.realizations);
        std::vector<std::exception_ptr> errors(workers);

        auto work = [&](int w) {
            try {
                for (int r = w; r < sc.realizations; r += workers) {
                    RandomStream ch_stream(sc.seed, stream_id(r, kChannelPurpose));
                    ComplexChannel ch = gen_channel(sc.users, sc.antennas, ch_stream);
                    RandomStream sym_stream(sc.seed, stream_id(r, kSymbolPurpose));
                    SymbolFrame frame = draw_frame(spec, sc.users, sc.slots, sym_stream);
                    RandomStream noise(sc.seed, stream_id(r, kNoisePurpose));
                    RealizationAccum acc;
                    std::vector<int> idx(sc.users);
                    for (int s = 0; s < sc.slots; ++s) {
                        for (int k = 0; k < sc.users; ++k) idx[k] = frame.index(k, s);
                        SlotStats st = simulate_slot(sc, mode, spec, ch, idx, pp, cfg, noise);
                        acc.power += st.power;
                        acc.mu += st.mu;
                        acc.iters += st.iters;
                        acc.infeas += st.infeas;
                        acc.flops += st.flops;
                        acc.bit_errors += st.bit_errors;
                        acc.bits += st.bits;
                        acc.feasible_slots += st.feasible ? 1 : 0;
                    }
                    per_real[r] = acc;
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        };

        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers);
            for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
            for (auto& t : threads) t.join();
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);

        SweepPoint pt;
        pt.sweep_value = db;
        long long n_slots = static_cast<long long>(sc.realizations) * sc.slots;
        long long feasible_total = 0;
        for (int r = 0; r < sc.realizations; ++r) {
            pt.avg_power += per_real[r].power;
            pt.avg_mu += per_real[r].mu;
            pt.avg_iters += per_real[r].iters;
            pt.avg_max_infeas += per_real[r].infeas;
            pt.flops += per_real[r].flops;
            pt.bit_errors += per_real[r].bit_errors;
            pt.bits += per_real[r].bits;
            feasible_total += per_real[r].feasible_slots;
        }
        pt.avg_power /= static_cast<double>(n_slots);
        pt.avg_mu /= static_cast<double>(n_slots);
        pt.avg_iters /= static_cast<double>(n_slots);
        pt.avg_max_infeas /= static_cast<double>(n_slots);
        pt.feasible_rate = static_cast<double>(feasible_total) / static_cast<double>(n_slots);
        pt.ber = pt.bits ? static_cast<double>(pt.bit_errors) / static_cast<double>(pt.bits) : 0.0;
        if (timing) {
            auto t1 = std::chrono::steady_clock::now();
            pt.wall_millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        out.points.push_back(pt);
    }
    return out;
}

}  // namespace

RunResult run_pm_sweep(const Scenario& sc, int jobs, bool timing) { return run_sweep(sc, SlpMode::PowerMin, jobs, timing); }

RunResult run_sb_sweep(const Scenario& sc, int jobs, bool timing) { return run_sweep(sc, SlpMode::SinrBalance, jobs, timing); }

PJADMMConfig scenario_config(const Scenario& sc, SlpMode mode) { return scenario_config_impl(sc, mode); }

CISystem slot_system(const Scenario& sc, double sweep_db, int realization, int slot) {
    if (realization < 0 || slot < 0) throw std::invalid_argument("slot_system: negative index");
    ConstellationSpec spec = make_constellation(sc.mod_kind, sc.mod_order);
    RandomStream ch_stream(sc.seed, stream_id(realization, kChannelPurpose));
    ComplexChannel ch = gen_channel(sc.users, sc.antennas, ch_stream);
    RandomStream sym_stream(sc.seed, stream_id(realization, kSymbolPurpose));
    int slots = std::max(sc.slots, slot + 1);
    SymbolFrame frame = draw_frame(spec, sc.users, slots, sym_stream);
    std::vector<int> idx(sc.users);
    for (int k = 0; k < sc.users; ++k) idx[k] = frame.index(k, slot);
    PointParams pp = point_params(sc.mode, sweep_db, sc.budget);
    return build_ci_system(ch, idx, spec, Vec{pp.gamma_lin}, Vec{pp.sigma});
}

}  // namespace slp
