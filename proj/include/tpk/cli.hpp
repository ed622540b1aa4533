#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tpk {

/// Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure.
int parse_and_dispatch(int argc, const char* const* argv);
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tpk
