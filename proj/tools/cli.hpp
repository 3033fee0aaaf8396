#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lobrep::cli {

/// Runs one command line. Exit codes: 0 ok, 1 runtime failure, 2 bad input
/// (parse errors in data, config or flags).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lobrep::cli
