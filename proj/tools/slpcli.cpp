// Command-line front end for the symbol-level precoding workbench:
// Monte-Carlo sweeps, convergence traces, constraint-system dumps and the
// library self-check suite. All default outputs are bit-reproducible; timing
// measurements are opt-in because they never are.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slp/duality.hpp"
#include "slp/harness.hpp"
#include "slp/oracle.hpp"
#include "slp/pif_solver.hpp"
#include "slp/scenario_io.hpp"
#include "slp/selfcheck.hpp"

namespace {

constexpr int kExitValidationFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitDiverged = 3;

slp::Scenario load_scenario(const std::string& path, const std::vector<std::string>& sets) {
    slp::Scenario sc;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw slp::ScenarioError("cannot open scenario file '" + path + "'");
        sc = slp::parse_scenario(in, path);
    }
    for (const std::string& s : sets) slp::apply_override(sc, s);
    return sc;
}

// Writes through a stringstream so a failed run never leaves a partial file.
void deliver(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw slp::ScenarioError("cannot open output file '" + out_path + "'");
    out << content;
}

int run_sweep_verb(slp::SlpMode mode, const std::string& scenario_path, const std::vector<std::string>& sets,
                   const std::string& out_path, int jobs, bool timing) {
    slp::Scenario sc = load_scenario(scenario_path, sets);
    if (sc.mode_explicit && sc.mode != mode)
        throw slp::ScenarioError("scenario pins the other mode; use the matching verb or drop the mode key");
    sc.mode = mode;
    slp::RunResult res = mode == slp::SlpMode::PowerMin ? slp::run_pm_sweep(sc, jobs, timing)
                                                        : slp::run_sb_sweep(sc, jobs, timing);
    std::ostringstream buf;
    slp::write_results_csv(res, buf);
    deliver(out_path, buf.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constructive-interference symbol-level precoding workbench"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, system_path;
    std::vector<std::string> sets;
    int jobs = 1;
    bool timing = false;
    int sweep_index = 0, realization = 0, slot = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "Scenario file (key = value lines)");
        cmd->add_option("--set", sets, "Override a scenario key, e.g. --set seed=7")->take_all();
        cmd->add_option("--out", out_path, "Output file (default: stdout)");
    };

    CLI::App* pm = app.add_subcommand("pm-sweep", "Average transmit power and BER over SINR targets");
    add_common(pm);
    pm->add_option("--jobs", jobs, "Worker threads over channel realizations")->check(CLI::PositiveNumber);
    pm->add_flag("--timing", timing, "Fill wallMillis (forfeits byte-level reproducibility)");

    CLI::App* sb = app.add_subcommand("sb-sweep", "Balanced-margin BER over transmit SNR points");
    add_common(sb);
    sb->add_option("--jobs", jobs, "Worker threads over channel realizations")->check(CLI::PositiveNumber);
    sb->add_flag("--timing", timing, "Fill wallMillis (forfeits byte-level reproducibility)");

    CLI::App* conv = app.add_subcommand("convergence", "Per-iteration trace of one slot's solve");
    add_common(conv);
    conv->add_option("--system", system_path, "Solve a dumped constraint-system fixture instead");
    conv->add_option("--sweep-index", sweep_index, "Sweep point to trace")->check(CLI::NonNegativeNumber);
    conv->add_option("--realization", realization, "Channel realization index")->check(CLI::NonNegativeNumber);
    conv->add_option("--slot", slot, "Symbol slot index")->check(CLI::NonNegativeNumber);

    CLI::App* dump = app.add_subcommand("dump-system", "Write one slot's constraint system as a text fixture");
    add_common(dump);
    dump->add_option("--sweep-index", sweep_index, "Sweep point to use")->check(CLI::NonNegativeNumber);
    dump->add_option("--realization", realization, "Channel realization index")->check(CLI::NonNegativeNumber);
    dump->add_option("--slot", slot, "Symbol slot index")->check(CLI::NonNegativeNumber);

    CLI::App* val = app.add_subcommand("validate", "Run the library invariant suite");
    val->add_option("--out", out_path, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    try {
        if (pm->parsed()) return run_sweep_verb(slp::SlpMode::PowerMin, scenario_path, sets, out_path, jobs, timing);
        if (sb->parsed()) return run_sweep_verb(slp::SlpMode::SinrBalance, scenario_path, sets, out_path, jobs, timing);

        if (conv->parsed()) {
            slp::Scenario sc = load_scenario(scenario_path, sets);
            slp::CISystem sys;
            if (!system_path.empty()) {
                std::ifstream in(system_path);
                if (!in) throw slp::ScenarioError("cannot open system fixture '" + system_path + "'");
                sys = slp::load_system(in);
                sc.users = sys.users;
                sc.antennas = sys.antennas;
                sc.mod_kind = sys.kind;
                sc.mod_order = sys.order;
            } else {
                if (scenario_path.empty()) throw slp::ScenarioError("convergence needs --scenario or --system");
                if (sweep_index >= static_cast<int>(sc.sweep_db.size()))
                    throw slp::ScenarioError("sweep-index out of range");
                sys = slp::slot_system(sc, sc.sweep_db[sweep_index], realization, slot);
            }
            slp::PJADMMConfig cfg = slp::scenario_config(sc, sc.mode);
            std::vector<slp::IterationRecord> trace;
            slp::solve_pm(sys, cfg, &trace);
            std::ostringstream buf;
            slp::write_trace_csv(trace, buf);
            deliver(out_path, buf.str());
            return 0;
        }

        if (dump->parsed()) {
            if (scenario_path.empty()) throw slp::ScenarioError("dump-system needs --scenario");
            slp::Scenario sc = load_scenario(scenario_path, sets);
            if (sweep_index >= static_cast<int>(sc.sweep_db.size())) throw slp::ScenarioError("sweep-index out of range");
            slp::CISystem sys = slp::slot_system(sc, sc.sweep_db[sweep_index], realization, slot);
            std::ostringstream buf;
            slp::dump_system(sys, buf);
            deliver(out_path, buf.str());
            return 0;
        }

        if (val->parsed()) {
            std::ostringstream buf;
            int failures = slp::run_selfchecks(buf);
            deliver(out_path, buf.str());
            return failures == 0 ? 0 : kExitValidationFailed;
        }
    } catch (const slp::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const slp::OracleFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const slp::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return 0;
}
