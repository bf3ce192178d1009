// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"

namespace typestate {

/// Parse, desugar, validate and check well-formedness. Stops at the first
/// stage that reports problems.
Outcome<Program> compile(std::string_view text, std::uint32_t file_id = 0);

}  // namespace typestate
