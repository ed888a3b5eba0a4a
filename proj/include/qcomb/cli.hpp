#pragma once

// Command-line front end: clone, learn, verify, random-comb.
//
// Exit codes: 0 success, 1 domain failure, 2 input error, 3 no convergence.
// QCOMB_THREADS sets the thread count of the linear-algebra kernels.

#include <iosfwd>
#include <string>
#include <vector>

namespace qcomb {

enum ExitCode : int { kExitOk = 0, kExitDomainFailure = 1, kExitInputError = 2, kExitNoConvergence = 3 };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcomb
