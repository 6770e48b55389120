#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slp/ci_system.hpp"
#include "slp/pif_solver.hpp"
#include "slp/rng.hpp"

namespace slp {

enum class SolverChoice { Pif, Oracle, Zf };

struct Scenario {
    std::string id = "scenario";
    int users = 4;
    int antennas = 8;
    ModKind mod_kind = ModKind::PSK;
    int mod_order = 4;
    SlpMode mode = SlpMode::PowerMin;
    bool mode_explicit = false;  // whether the scenario text pinned the mode
    std::vector<double> sweep_db = {10.0};  // SINR targets (PM) or transmit SNR points (SB), in dB
    double budget = 1.0;                    // SB transmit power budget
    int realizations = 10;                  // independent channels
    int slots = 20;                         // symbol slots per channel
    std::uint64_t seed = 1;
    SolverChoice solver = SolverChoice::Pif;
    // Optional solver overrides; anything unset comes from default_config.
    std::optional<double> rho, beta, tau, delta_tol;
    std::optional<int> fixed_iters, max_iters;
    std::optional<PartitionStrategy> partition;
    int n_blocks = 1;
};

struct SweepPoint {
    double sweep_value = 0.0;
    double avg_power = 0.0;
    double ber = 0.0;
    double avg_mu = 0.0;
    double avg_iters = 0.0;
    double avg_max_infeas = 0.0;  // of the power-min subproblem solution
    double feasible_rate = 0.0;   // slots within 1e-6 * (1 + ||b||_inf)
    long long bit_errors = 0;
    long long bits = 0;
    long long flops = 0;
    double wall_millis = 0.0;  // stays 0 unless timing is requested
};

struct RunResult {
    std::string scenario_id;
    std::vector<SweepPoint> points;
};

// Entries i.i.d. CN(0,1), drawn row-major (user-major, antenna-minor), each
// as Re then Im with variance 1/2.
ComplexChannel gen_channel(int users, int antennas, RandomStream& stream);

// Exact channel inversion: returns the real stacking of
// x~ = H^H (H H^H)^{-1} s~, so h_k^T x~ = s~_k. Needs users <= antennas.
Vec zf_direction(const ComplexChannel& ch, const std::vector<cplx>& symbols);

// The inversion direction rescaled to transmit power p.
Vec zf_baseline(const ComplexChannel& ch, const std::vector<cplx>& symbols, double p);

// Monte-Carlo sweeps. Randomness is addressed, not consumed in sequence:
// realization r always reads streams (seed, r << 8 | {0: channel, 1: symbols,
// 2: noise}) from the start, so every sweep point sees the same channels,
// symbols and unit-variance noise (scaled by the point's sigma), results do
// not depend on the number of jobs, and reruns are bit-identical.
//
// PowerMin: sweep values are per-user SINR targets with sigma = 1; reports
// average transmit power and the BER of the nominally scaled receiver.
// SinrBalance: sweep values are transmit SNR = budget / sigma^2; each slot
// solves power minimization at thresholds sigma and stretches the solution
// onto the budget; the receiver normalizes by the achieved margin.
RunResult run_pm_sweep(const Scenario& sc, int jobs = 1, bool timing = false);
RunResult run_sb_sweep(const Scenario& sc, int jobs = 1, bool timing = false);

// Builds the slot system exactly as the sweeps do; realization/slot pick one
// Monte-Carlo cell, sweep_db one sweep value.
CISystem slot_system(const Scenario& sc, double sweep_db, int realization, int slot);

// The solver configuration a sweep would use: mode-aware defaults with the
// scenario's overrides applied.
PJADMMConfig scenario_config(const Scenario& sc, SlpMode mode);

}  // namespace slp
