#pragma once

#include <ostream>

namespace stmc::cli {

// Exit status: 0 property holds / success, 1 property violated or events
// dead-lettered, 2 usage, file or parse error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stmc::cli
