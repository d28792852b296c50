#pragma once

// Command-line front end. Exit codes: 0 success, 2 bad input, 3 numerical failure.

#include <iosfwd>
#include <string>

namespace scqc::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

std::string version();

/// Runs one command; all output goes to `out` / `err` or to the files named by flags.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scqc::cli
