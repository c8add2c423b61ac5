#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace varsearch::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,   // runtime error
  kUsage = 2,     // bad flags or config
  kMismatch = 3,  // replay differs from the record
};

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varsearch::cli
