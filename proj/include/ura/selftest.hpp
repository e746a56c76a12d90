#pragma once

#include <iosfwd>

namespace ura {

/// Quick built-in consistency checks; prints one line per check and returns
/// the number of failures.
int run_selftest(std::ostream& os);

}  // namespace ura
