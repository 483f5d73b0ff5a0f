#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqp::cli {

// Process exit codes.
enum Exit : int {
  kOk = 0,
  kFailure = 1,        // verification failures or an unexpected error
  kParse = 2,          // unreadable input or bad command line
  kBadIndex = 3,       // indices out of range or incompatible
  kRankDeficient = 4,
  kUnknownCheck = 5,
};

// Parses an index token: decimal, fraction "a/b", or "inf".
double parse_index(const std::string& token);

// Runs the tool on argv-style arguments (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqp::cli
