#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pmdp {

// Runs the command-line tool on `args` (program name excluded). Canonical
// JSON reports go to `out`; diagnostics and wall-clock timing go to `err`,
// keeping `out` byte-identical across runs with the same inputs and seeds.
// Returns the process exit code: 0 success, 1 domain error (with a
// machine-readable error record on `out`), 2 malformed input or usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pmdp
