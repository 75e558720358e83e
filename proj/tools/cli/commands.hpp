#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "objhc/error.hpp"

namespace objhc::cli {

enum ExitCode : int { kOk = 0, kIo = 1, kParams = 2, kAlgorithm = 3 };

int exit_code_for(ErrorKind kind);

// Entry point shared by the binary and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ".87/.45" style pair; two decimals, no leading zero below one.
std::string format_pair(double alpha, double alpha_star);
std::string format_fraction(double x);

}  // namespace objhc::cli
