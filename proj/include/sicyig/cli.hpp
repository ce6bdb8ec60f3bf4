#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sicyig::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numerical = 2;

/// Runs the command line. Data goes to `out` (or files under --out),
/// diagnostics and the run manifest (without --out) to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace sicyig::cli
