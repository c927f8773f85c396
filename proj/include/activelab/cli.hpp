#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace activelab::cli {

/// Runs one command line (argv[0] is the program name). Returns 0 on success,
/// 1 on a domain error or failed validation, 2 on a usage error.
int parse_and_dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace activelab::cli
