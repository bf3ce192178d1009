// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "typestate/ast.hpp"

namespace typestate {

/// Canonical source form of a surface program. Parsing the output and
/// printing again yields the same text.
std::string print_program(const SurfaceProgram& program);

/// Expression in surface syntax where possible. Run-time forms print in the
/// calculus notation (`o3.f`, `o3.tt`) and are not re-parseable.
std::string print_expr(const ExprPtr& e);

std::string print_ref(const Ref& r);

/// Shortest round-tripping decimal form, always with a fractional part.
std::string format_float(double value);

}  // namespace typestate
