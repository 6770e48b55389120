#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "slp/harness.hpp"

namespace slp {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value text, '#' starts a comment, keys may appear once.
// Unknown keys are errors so typos cannot silently fall back to defaults.
//
//   scenarioId = qpsk-12x16-sb
//   modulation = qpsk          # bpsk | qpsk | 8psk | 16qam | ... | pskM | qamM
//   mode       = sb            # pm | sb
//   users      = 12
//   antennas   = 16
//   sweepDb    = 0, 4, 8, 12, 16
//   budget     = 1.0
//   realizations = 20
//   slots      = 20
//   seed       = 1
//   solver     = pif           # pif | oracle | zf
//   rho, beta, tau, deltaTol, fixedIters, maxIters   # solver overrides
//   partition  = contiguous    # scalar | antenna | contiguous
//   blocks     = 1
Scenario parse_scenario(std::istream& in, const std::string& origin = "scenario");

// One "key=value" assignment, same grammar and checks as the file keys.
void apply_override(Scenario& sc, const std::string& assignment);

void parse_modulation(const std::string& name, ModKind& kind, int& order);
std::string modulation_name(ModKind kind, int order);

// scenarioId,sweepValue,avgPower,BER,avgMu,avgIters,maxInfeas,wallMillis
// maxInfeas is the per-slot maximum violation averaged over slots; wallMillis
// is 0 unless timing was requested, so default outputs are bit-reproducible.
void write_results_csv(const RunResult& res, std::ostream& out);

// iter,objective,delta,maxInfeas,kktResidual
void write_trace_csv(const std::vector<IterationRecord>& trace, std::ostream& out);

}  // namespace slp
