// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"

namespace typestate {

/// Parses a whole `.pap` source file. On failure every diagnostic has kind
/// `SyntaxError` and a span inside `text`; the parser resynchronizes at the
/// next top-level `class`, `enum` or `main` to report further errors.
Outcome<SurfaceProgram> parse(std::string_view text, std::uint32_t file_id = 0);

/// Parses a standalone usage, e.g. `rec X.{m; X}`. Non-contractive
/// recursion (`rec X.X`) is rejected here.
Outcome<UsagePtr> parse_usage(std::string_view text, std::uint32_t file_id = 0);

/// Parses a standalone surface expression (bare identifiers left unresolved).
Outcome<ExprPtr> parse_expression(std::string_view text, std::uint32_t file_id = 0);

}  // namespace typestate
