#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfgplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;

// Subcommands: validate, solve, monitor, manufactured, certify-moser,
// lemma-bound. Returns 0 on success, 2 when a certificate or convergence check
// fails, 1 on usage or data errors (one-line message on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfgplan::cli
