#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcrip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailure = 3;  ///< budget exceeded or solver did not converge

/// Runs one subcommand. `args` excludes the program name. The JSON document
/// goes to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

/// Every subcommand name, in help order.
const std::vector<std::string>& subcommands();

}  // namespace lcrip::cli
