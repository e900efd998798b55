#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace futs::cli {

/// Runs the command line: `futs parse|lts|bisim|minimize|xcheck|gen ...`.
/// Exit codes: 0 ok, 1 diagnostics/failed checks, 2 I/O, 3 not-bisimilar.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace futs::cli
