#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlines {

/// Entry point of the command-line tool; args excludes the program name.
/// Returns 0 on success, 1 when a verification fails, 2 on usage or input
/// errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlines
