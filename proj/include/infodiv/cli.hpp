#pragma once

#include "infodiv/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace infodiv::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2 };

// args excludes the program name. Results go to out (or to --out), errors to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infodiv::cli
