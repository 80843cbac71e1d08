#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pst {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "PST_OUT_DIR";

/// Runs one `pst` invocation; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pst
