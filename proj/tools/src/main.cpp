// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv)
{
  return qpro::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
