// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpro::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,  // bad flags or invalid input files
  kExitInfeasible = 2,
  kExitVerifyFailed = 3,
};

// Runs `qpro <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpro::cli
