#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace termrank {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point behind the `termrank` binary; `args` excludes the program
// name. Data goes to `out` or to files, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace termrank
