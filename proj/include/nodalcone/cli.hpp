#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nodalcone {

// Runs the command-line interface on pre-split arguments (excluding argv[0]).
// Exit codes: 0 success (verify: pass), 1 verify fail, 2 configuration error,
// 3 numeric-accuracy error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nodalcone
