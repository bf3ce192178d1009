// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"

namespace typestate {

/// Loop well-formedness of a core expression. Diagnostics carry kind
/// `IllFormed` and rule `wf-1` .. `wf-4`:
///   wf-1  a continue is followed by another expression once unfolded
///   wf-2  a continue names no enclosing label
///   wf-3  a continue is not guarded by an `if` or `match`
///   wf-4  every branch of a labelled expression ends in a continue
std::vector<Diagnostic> well_formed_expr(const ExprPtr& e);

/// well_formed_expr on the body, plus rule `wf-rec`: every call of the
/// method on `this` sits inside a branch of an `if` or `match`.
std::vector<Diagnostic> well_formed_method(const MethodDecl& m, const ClassDecl& enclosing);

/// Every method of every class, Main included.
std::vector<Diagnostic> well_formed_program(const Program& program);

}  // namespace typestate
