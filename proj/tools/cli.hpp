#pragma once

// Command-line front end: validate, lemma-sweep, series, entropy-bound.

#include <ostream>
#include <string>
#include <vector>

namespace graphent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUncertified = 3;

/// Runs one command; args exclude the program name. Results go to `out`,
/// progress and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graphent::cli
