#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergolab::cli {

/// Exit codes: 0 success, 1 domain error (infeasible or rejected input), 2 usage error.
int run(int argc, char** argv);

/// args excludes the program name; primary output goes to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ergolab::cli
