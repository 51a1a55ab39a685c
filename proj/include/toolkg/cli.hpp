#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toolkg::cli {

// Exit codes: 0 ok, 1 pipeline error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toolkg::cli
