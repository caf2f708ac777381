#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sarcam::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitBadArguments = 2,
  kExitBadInput = 3,
  kExitComputeFailure = 4,
  kExitNoLocalization = 5,
};

inline constexpr const char* kToolVersion = "0.1.0";

/// Entry point of the `sarcam` tool. Failures print one line starting
/// with `ERROR:<exit code>:` to `err`.
int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sarcam::cli
