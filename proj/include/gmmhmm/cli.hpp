#ifndef GMMHMM_CLI_HPP
#define GMMHMM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gmmhmm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `gmmhmm` tool; `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmmhmm

#endif  // GMMHMM_CLI_HPP
