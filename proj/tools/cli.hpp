#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xlemb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Entry point shared by the binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xlemb::cli
