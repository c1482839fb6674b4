#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgas::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDegenerate = 2,
  kBoundViolation = 3,
};

/// Entry point of the `pgas` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace pgas::cli
