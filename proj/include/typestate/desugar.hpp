// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"

namespace typestate {

/// Surface to core:
///  - bare identifiers become the parameter or `this.f`;
///  - `#l` is tied to `this` and to the enum declaring `l`;
///  - missing parameters become `_: void`, missing return types `void`;
///  - the `main` block becomes class Main with usage `{main; end}`;
///  - loop labels shadowing an enclosing label are renamed apart;
///  - named type annotations are resolved to classes or enums.
/// Fails with UnknownIdentifier, UnknownField, UnknownType, UnknownClass,
/// UnknownLabel or InvalidAssignment diagnostics.
Outcome<Program> desugar(const SurfaceProgram& surface);

/// Declaration-level checks on a desugared program: distinct class, enum,
/// field, method and label names; closed, contractive usages with distinct
/// branch and choice names; every usage method declared by its class.
std::vector<Diagnostic> validate_program(const Program& program);

}  // namespace typestate
