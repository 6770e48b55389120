#pragma once

#include <iosfwd>

namespace slp {

// Runs the library invariant suite (every module's structural properties on
// seeded random instances), printing one PASS/FAIL line per check. Returns
// the number of failures.
int run_selfchecks(std::ostream& out);

}  // namespace slp
