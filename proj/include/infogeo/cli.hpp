#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace infogeo::cli {

/// Exit codes: 0 success, 1 domain error (infeasible target, biased
/// estimator, ...), 2 input or usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitInput = 2;

/// Runs one subcommand. args excludes the program name. Reports go to out
/// unless --out names a file; diagnostics and usage go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infogeo::cli
