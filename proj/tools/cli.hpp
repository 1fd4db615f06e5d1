#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cimtune::cli {

enum ExitCode : int { kFeasible = 0, kInputError = 1, kNoFeasible = 2, kBudgetExhausted = 3 };

/// Runs one command line (args[0] is the program name). Normal output goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cimtune::cli
