#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace zf::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

// Entry point of the zf tool; output goes to the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zf::cli
