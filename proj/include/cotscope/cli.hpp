#pragma once

#include <iosfwd>

namespace cotscope {

/// Entry point of the `cotscope` executable. Returns the process exit status:
/// 0 success, 1 some samples failed (results still written), 2 startup error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cotscope
