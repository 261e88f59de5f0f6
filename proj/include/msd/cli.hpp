#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msd {

// Entry point shared by the msdesign tool and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msd
