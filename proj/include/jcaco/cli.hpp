#pragma once

// Command-line front end. Subcommands: generate | run | verify | sweep |
// report. Exit codes: 0 success, 1 configuration/validation error (the
// message names the offending input), 2 verification violation. All file
// outputs are written atomically.

#include <string>
#include <vector>

namespace jcaco {

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace jcaco
