#pragma once

#include <string>
#include <vector>

namespace dmdroi::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kIo = 3,
  kEmptyResult = 4,
};

/// Runs one `dmdroi` invocation; args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace dmdroi::cli
