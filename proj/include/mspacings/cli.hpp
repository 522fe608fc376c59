#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mspacings::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedCheck = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name. Reports go to the
// --out file when given, otherwise to `out`; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mspacings::cli
