#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgmrisk::cli {

/// Exit codes: 0 success, 1 validation error, 2 numeric failure,
/// 3 reproduction mismatch.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgmrisk::cli
