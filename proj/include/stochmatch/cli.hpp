#ifndef STOCHMATCH_CLI_HPP_
#define STOCHMATCH_CLI_HPP_

#include <ostream>
#include <string>

#include "stochmatch/core_model.hpp"

namespace stochmatch::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResourceCap = 3;

/// Full command-line front end; returns the process exit code.  All output
/// is deterministic for fixed arguments (seeds default to 0, never the
/// clock).  The STOCHMATCH_MAX_ENUM environment variable overrides the
/// enumeration cap used by exact computations.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

/// "%.12g"-style rendering used for every numeric value the CLI prints.
std::string format_significant(double value, int digits = 12);

/// Resolves a model source: "sn:<n>" and "triad:<eps>" generate built-in
/// families, anything else is read as a scenario file path.
StochasticModel resolve_model(const std::string& source);

}  // namespace stochmatch::cli

#endif  // STOCHMATCH_CLI_HPP_
