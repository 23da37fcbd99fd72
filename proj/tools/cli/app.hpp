#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ucontract::cli {

/// Entry point of the command-line tool; args excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucontract::cli
