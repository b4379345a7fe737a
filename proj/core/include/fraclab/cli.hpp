#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fraclab::cli {

enum ExitCode : int { success = 0, validation_failure = 1, non_convergence = 2 };

/// Runs one subcommand. `args` excludes the program name.
///
///   constants   --N <int> --s <real> [--q <real>]
///   check-model --config <file> [--samples <int>] [--u-range <real>] [--seed <int>]
///   solve       --config <file> --out <csv>
///   sweep       --config <file> --out <dir> [--allow-partial]
///
/// Returns 0 on success, 1 on invalid input, a missing file or a failed
/// assumption check, and 2 when a solve does not converge. An unknown
/// subcommand prints the usage text to `err` and returns 1.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace fraclab::cli
