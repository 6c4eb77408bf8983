#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace congibbs::cli {

// One CLI invocation. `args` holds the arguments without the program name,
// in the usual order. Exit codes: 0 success, 1 input error, 2 verification
// failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace congibbs::cli
