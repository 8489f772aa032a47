#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace sg {

// full command-line surface, reusable in-process: parses args (no program
// name), runs the chosen subcommand, writes results to `out` and one JSON
// error object to `err` on failure. returns the process exit code: 0 ok,
// 2 usage, 3 domain, 4 numeric, 5 resource.
int dispatch(std::vector<std::string> args, std::ostream& out,
             std::ostream& err);

} // namespace sg
