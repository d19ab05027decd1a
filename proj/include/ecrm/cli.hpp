#pragma once

#include <iosfwd>

namespace ecrm {

/// Runs the ecrm command line. Returns 0 on success, 2 on bad input or
/// usage, 3 on numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecrm
