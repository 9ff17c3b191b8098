// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstdint>

#include "qpro/model.hpp"

namespace qpro {

// Four-segment library used when no --lib is given; rd(200 ps) = 72 ps.
CellLibrary default_library();

// Small three-breakpoint library for fixtures: identical cells with
// c2q = 10, setup = hold = 5 and rd = 0.3 T + 6 on (0, 100], 0.36 T on (100, 300].
CellLibrary reference_library();

struct GeneratorOptions
{
  int rows = 10;
  int width = 4;
  std::uint64_t seed = 1;
  double chain_prob = 0.3;  // per logic gate: add a 1-4 buffer chain further down
  double skip_prob = 0.1;   // per logic gate: add a connection skipping one row
  bool adversarial = false;
};

/// Synthetic layered circuit, byte-for-byte reproducible from the options.
///
/// Unless adversarial, lengths and clock offsets are drawn inside a budget
/// derived from the library at t_max so that a schedule exists at that period.
/// Throws Error(BAD_VALUE) for bad options or a library that leaves no budget.
Circuit generate_circuit(const GeneratorOptions& options, const CellLibrary& library);

}  // namespace qpro
