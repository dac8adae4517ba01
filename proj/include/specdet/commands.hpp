#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specdet::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_invalid = 2,
  exit_infeasible = 3,
  exit_not_converged = 4,
};

/// Runs one specdet invocation. args are the command-line words after the
/// program name, e.g. {"det", "--input", "zero.json"}. Reports go to out,
/// diagnostics to err; the return value is the process exit status.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// v rounded to the given number of significant decimal digits.
double round_significant(double v, int digits = 12);

/// Doubling sequence of at most five cutoffs ending at cutoff, e.g.
/// 64 -> {4, 8, 16, 32, 64}, 10 -> {1, 2, 5, 10}.
std::vector<long> profile_cutoffs(long cutoff);

}  // namespace specdet::cli
