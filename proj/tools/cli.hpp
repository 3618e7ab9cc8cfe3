#ifndef QLIM_TOOLS_CLI_HPP_
#define QLIM_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace qlim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

// Runs one command line (arguments after the program name).  Everything
// the command prints goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace qlim::cli

#endif  // QLIM_TOOLS_CLI_HPP_
