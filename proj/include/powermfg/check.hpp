#pragma once

#include <ostream>

#include "powermfg/config.hpp"

namespace powermfg {

// Invariant battery behind the `check` subcommand: fast self-tests of every
// module's advertised guarantees, one printed line each. Items use the
// configured efficiency and game constants where any valid scenario must
// satisfy them, and pinned desk scenarios where equilibrium convergence
// itself is the thing under test. Returns the number of failed items.
int run_check_suite(const RunConfig& cfg, std::ostream& out);

}  // namespace powermfg
