#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momentforge::cli {

/// Exit codes: success, mathematical refutation, input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRefuted = 1;
inline constexpr int kExitInputError = 2;

/// Runs one command line (without the program name). Input paths may be "-"
/// for `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace momentforge::cli
