#pragma once

#include <string>
#include <vector>

namespace nrq {

// Batch entry point. argv without the program name, e.g.
//   {"solve", "--config", "scenarios/power.cfg", "--out", "runs/power"}.
// Exit codes: 0 success, 1 hypothesis/validation failure, 2 solver
// non-convergence. Errors are emitted as JSON on standard error.
int run_command(const std::vector<std::string>& args);

} // namespace nrq
