#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace effmed::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,     // bad flags, bad config, unwritable output
  kFailure = 2,   // bound violation, parameter regime, identity failure
};

/// Runs the effmed command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace effmed::cli
